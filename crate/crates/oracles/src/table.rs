use std::fmt::Write as _;

/// One oracle value at one evaluation point (price units).
#[derive(Debug, Clone, PartialEq)]
pub struct ReferencePrice {
    pub model: String,
    pub point: [f64; 2],
    pub value: f64,
    /// Estimated absolute error; the spread between the two resolutions.
    pub accuracy: f64,
    pub method: String,
}

impl ReferencePrice {
    pub fn new(model: &str, point: [f64; 2], value: f64, accuracy: f64, method: &str) -> Self {
        Self {
            model: model.to_string(),
            point,
            value,
            accuracy,
            method: method.to_string(),
        }
    }
}

/// CSV with header `model,point,value,accuracy,method`; the point is written
/// as `x;y` so that it occupies one column.
pub fn reference_table_csv(rows: &[ReferencePrice]) -> String {
    let mut out = String::from("model,point,value,accuracy,method\n");
    for r in rows {
        writeln!(
            out,
            "{},{};{},{:.12e},{:.3e},{}",
            r.model,
            r.point[0],
            r.point[1],
            r.value,
            r.accuracy,
            r.method.replace(',', " ")
        )
        .unwrap();
    }
    out
}
