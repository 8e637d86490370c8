//! Five-number summaries of the `ratio` column.
//!
//! Quartiles use the inclusive-median convention: with an odd number of
//! values the median belongs to both halves, and Q1/Q3 are the medians of
//! those halves. For `1, 2, 3, 4, 5` that gives `2` and `4`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::experiment::Record;

pub const GROUP_KEYS: [&str; 6] = ["model", "n", "ell", "tsm", "algo", "mode"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub group: String,
    pub count: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
}

fn median(sorted: &[f64]) -> f64 {
    let k = sorted.len();
    if k % 2 == 1 {
        sorted[k / 2]
    } else {
        (sorted[k / 2 - 1] + sorted[k / 2]) / 2.0
    }
}

/// `(min, q1, median, q3, max)` of a non-empty slice.
pub fn five_numbers(values: &[f64]) -> (f64, f64, f64, f64, f64) {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    let half = k.div_ceil(2);
    let lower = &v[..half];
    let upper = &v[k - half..];
    (v[0], median(lower), median(&v), median(upper), v[k - 1])
}

fn key_of(r: &Record, key: &str) -> Option<String> {
    Some(match key {
        "model" => r.model.clone(),
        "n" => r.n.to_string(),
        "ell" => r.ell.to_string(),
        "tsm" => r.tsm.clone(),
        "algo" => r.algo.clone(),
        "mode" => r.mode.clone(),
        _ => return None,
    })
}

/// One summary per distinct value of `keys`, rows without a ratio
/// skipped. Groups are ordered by first appearance.
pub fn aggregate(records: &[Record], keys: &[&str]) -> Result<Vec<Summary>, String> {
    if let Some(k) = keys.iter().find(|k| !GROUP_KEYS.contains(k)) {
        return Err(format!("cannot group by {k:?} (one of {})", GROUP_KEYS.join(", ")));
    }
    let mut order: Vec<String> = Vec::new();
    let mut groups: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for r in records {
        let Some(ratio) = r.ratio else { continue };
        let label = keys.iter().map(|k| key_of(r, k).expect("checked")).collect::<Vec<_>>().join("/");
        let entry = groups.entry(label.clone()).or_default();
        if entry.is_empty() {
            order.push(label);
        }
        entry.push(ratio);
    }
    Ok(order
        .into_iter()
        .map(|g| {
            let v = &groups[&g];
            let (min, q1, median, q3, max) = five_numbers(v);
            Summary { count: v.len(), min, q1, median, q3, max, mean: v.iter().sum::<f64>() / v.len() as f64, group: g }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_quartiles() {
        assert_eq!(five_numbers(&[5.0, 1.0, 4.0, 2.0, 3.0]), (1.0, 2.0, 3.0, 4.0, 5.0));
        assert_eq!(five_numbers(&[1.5]), (1.5, 1.5, 1.5, 1.5, 1.5));
        assert_eq!(five_numbers(&[1.0, 2.0, 3.0, 4.0]), (1.0, 1.5, 2.5, 3.5, 4.0));
    }

    fn rec(algo: &str, ratio: Option<f64>) -> Record {
        Record {
            model: "er".into(),
            n: 10,
            ell: 2,
            tsm: "linear".into(),
            seed: 0,
            rep: 0,
            algo: algo.into(),
            mode: "exact".into(),
            cost: None,
            opt_cost: None,
            ratio,
            stp_calls: None,
            runtime_ms: None,
            error: None,
        }
    }

    #[test]
    fn groups_by_keys() {
        let rows = [rec("bu", Some(1.2)), rec("td", Some(1.0)), rec("bu", Some(1.4)), rec("bu", None)];
        let s = aggregate(&rows, &["algo"]).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!((s[0].group.as_str(), s[0].count), ("bu", 2));
        assert!((s[0].mean - 1.3).abs() < 1e-12);
        assert_eq!(s[1].min, 1.0);
        assert_eq!(aggregate(&rows, &["ell", "algo"]).unwrap()[0].group, "2/bu");
        assert!(aggregate(&rows, &["colour"]).is_err());
    }
}
