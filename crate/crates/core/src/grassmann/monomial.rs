use super::GrassmannError;

/// Product of distinct generators in canonical (ascending index) order,
/// stored as a bit set.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(u64);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    pub fn from_bits(bits: u64) -> Self {
        Monomial(bits)
    }

    pub fn single(index: usize) -> Self {
        debug_assert!(index < 64);
        Monomial(1u64 << index)
    }

    /// Builds a monomial from indices given in strictly ascending order.
    pub fn from_canonical(indices: &[usize]) -> Result<Self, GrassmannError> {
        let mut bits = 0u64;
        let mut last: Option<usize> = None;
        for &i in indices {
            if i >= 64 {
                return Err(GrassmannError::UnknownGenerator(format!("#{i}")));
            }
            if last.is_some_and(|l| l >= i) {
                return Err(GrassmannError::NonCanonical(indices.to_vec()));
            }
            last = Some(i);
            bits |= 1 << i;
        }
        Ok(Monomial(bits))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn degree(self) -> u32 {
        self.0.count_ones()
    }

    pub fn contains(self, index: usize) -> bool {
        self.0 & (1 << index) != 0
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    pub fn max_index(self) -> Option<usize> {
        (self.0 != 0).then(|| 63 - self.0.leading_zeros() as usize)
    }

    pub fn without(self, index: usize) -> Self {
        Monomial(self.0 & !(1 << index))
    }

    /// Number of generators in `self` with index below `index`.
    pub fn count_below(self, index: usize) -> u32 {
        (self.0 & ((1u64 << index) - 1)).count_ones()
    }

    /// Canonical product `self · other`: `None` if a generator repeats,
    /// otherwise the merged monomial and whether the merge is odd.
    pub fn product(self, other: Monomial) -> Option<(Monomial, bool)> {
        if self.0 & other.0 != 0 {
            return None;
        }
        // Each generator of `other` must hop over every generator of `self`
        // with a larger index.
        let mut swaps = 0u32;
        for j in other.indices() {
            swaps += (self.0 >> j >> 1).count_ones();
        }
        Some((Monomial(self.0 | other.0), swaps % 2 == 1))
    }

    /// Reversal sign: reversing the order of a degree-k product gives
    /// (−1)^{k(k−1)/2}.
    pub fn reversal_is_odd(self) -> bool {
        let k = self.degree() as u64;
        (k * k.saturating_sub(1) / 2) % 2 == 1
    }
}
