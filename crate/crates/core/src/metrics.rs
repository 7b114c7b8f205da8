//! Error measures restricted to the central quarter of the grid area.

use crate::tensor::{ComponentIndex, MixedTensorField};

/// Weighted `Σ a·b` over the central half of each axis.
pub fn central_inner(a: &MixedTensorField, b: &MixedTensorField) -> f64 {
    assert!(a.is_compatible(b), "fields must share orders and grid");
    let r = a.grid().central_quarter();
    let mut total = 0.0;
    for ci in ComponentIndex::all(a.k(), a.l()) {
        let (pa, pb) = (a.plane(ci.p, ci.q), b.plane(ci.p, ci.q));
        let mut s = 0.0;
        for i in r.clone() {
            for j in r.clone() {
                s += pa[[i, j]] * pb[[i, j]];
            }
        }
        total += ci.weight(a.k(), a.l()) * s;
    }
    total * a.grid().pixel_area()
}

/// `‖a − b‖ / ‖b‖` on the central quarter, weighted L².
pub fn central_rel_l2(a: &MixedTensorField, b: &MixedTensorField) -> f64 {
    let d = a.sub(b).expect("compatible fields");
    let den = central_inner(b, b);
    if den == 0.0 {
        return central_inner(&d, &d).sqrt();
    }
    (central_inner(&d, &d) / den).sqrt()
}

/// Least-squares gain `⟨a, b⟩ / ⟨b, b⟩` of `a` against `b` on the central quarter.
pub fn central_gain(a: &MixedTensorField, b: &MixedTensorField) -> f64 {
    central_inner(a, b) / central_inner(b, b)
}
