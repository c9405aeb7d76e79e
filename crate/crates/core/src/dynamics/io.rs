//! Text exports: trajectories as CSV and distributions as JSON grids.

use serde_json::json;

use super::flow::Trajectory;
use super::liouville::Distribution;

fn column_names(d: usize) -> Vec<String> {
    if d == 2 {
        return ["t", "q", "p", "lambda_q", "lambda_p", "J11", "J12", "J21", "J22", "detJ"]
            .map(String::from)
            .to_vec();
    }
    let n = d / 2;
    let mut cols = vec!["t".to_string()];
    cols.extend((1..=n).map(|j| format!("q{j}")));
    cols.extend((1..=n).map(|j| format!("p{j}")));
    cols.extend((0..d).map(|a| format!("lambda_{a}")));
    for a in 1..=d {
        cols.extend((1..=d).map(|b| format!("J{a}_{b}")));
    }
    cols.push("detJ".into());
    cols
}

/// One row per sample: t, φ, λ, J in row-major order, det J.
pub fn trajectory_csv(tr: &Trajectory) -> String {
    let d = tr.endpoint().phi.len();
    let mut out = column_names(d).join(",");
    out.push('\n');
    for s in &tr.states {
        let mut row = vec![s.t];
        row.extend(s.phi.iter());
        row.extend(s.lambda.iter());
        for a in 0..d {
            row.extend((0..d).map(|b| s.jacobi[(a, b)]));
        }
        row.push(s.det_jacobi());
        let cells: Vec<String> = row.iter().map(|x| format!("{x:.17e}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn distribution_json(dist: &Distribution) -> serde_json::Value {
    let g = &dist.grid;
    json!({
        "q_min": g.q_min,
        "q_max": g.q_max,
        "p_min": g.p_min,
        "p_max": g.p_max,
        "nq": g.nq,
        "np": g.np,
        "layout": "row-major, q slow",
        "values": dist.values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{extended_flow, BuiltinModel, ExtendedState, FlowOptions, Grid};
    use nalgebra::DVector;

    #[test]
    fn csv_has_header_and_rows() {
        let st = ExtendedState::initial(0.0, DVector::from_row_slice(&[1.0, 0.0]), DVector::zeros(2));
        let opts = FlowOptions { sample_every: 100, ..Default::default() };
        let tr = extended_flow(&BuiltinModel::Harmonic, &st, 1.0, &opts).unwrap();
        let csv = trajectory_csv(&tr);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,q,p,lambda_q,lambda_p,J11,J12,J21,J22,detJ");
        assert_eq!(lines.len(), 12);
        let last: Vec<f64> = lines[11].split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(last.len(), 10);
        assert!((last[9] - 1.0).abs() < 1e-12);
        assert!((last[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn grid_json_round_numbers() {
        let g = Grid::new((0.0, 1.0), (0.0, 2.0), 4, 4).unwrap();
        let d = Distribution::from_fn(g, |q, _| q).unwrap();
        let v = distribution_json(&d);
        assert_eq!(v["values"].as_array().unwrap().len(), 16);
        assert_eq!(v["nq"], 4);
    }
}
