//! JSON document form of an element:
//! `{"generators":[names], "terms":[{"mono":[indices],"re":x,"im":y}]}`.
//!
//! Float coefficients are written as JSON numbers, exact coefficients as
//! rational strings such as `"-3/4"`.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{Algebra, Coefficient, GrassmannElement, GrassmannError, Monomial};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermDoc {
    mono: Vec<usize>,
    re: Value,
    im: Value,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ElementDoc {
    generators: Vec<String>,
    terms: Vec<TermDoc>,
}

impl<C: Coefficient> GrassmannElement<C> {
    pub fn to_json_value(&self) -> Value {
        let doc = ElementDoc {
            generators: self.table().names().to_vec(),
            terms: self
                .terms()
                .map(|(m, c)| {
                    let (re, im) = c.to_json_parts();
                    TermDoc {
                        mono: m.indices().collect(),
                        re,
                        im,
                    }
                })
                .collect(),
        };
        serde_json::to_value(doc).expect("element document serializes")
    }

    pub fn to_json(&self) -> String {
        self.to_json_value().to_string()
    }

    /// Parses a document written for `algebra`'s table. Generator names must
    /// match the table exactly and monomial indices must be strictly
    /// ascending.
    pub fn from_json(algebra: &Algebra<C>, text: &str) -> Result<Self, GrassmannError> {
        let doc: ElementDoc =
            serde_json::from_str(text).map_err(|e| GrassmannError::InvalidJson(e.to_string()))?;
        if doc.generators.as_slice() != algebra.table().names() {
            return Err(GrassmannError::InvalidJson(
                "generator list does not match the table".into(),
            ));
        }
        let mut terms = Vec::with_capacity(doc.terms.len());
        for t in doc.terms {
            let m = Monomial::from_canonical(&t.mono)?;
            let c = C::from_json_parts(&t.re, &t.im).map_err(GrassmannError::InvalidJson)?;
            terms.push((m, c));
        }
        algebra.from_terms(terms)
    }
}
