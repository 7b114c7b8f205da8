//! Index-enumeration versions of the pointwise operators, one pixel at a time. Slow on purpose: every
//! entry of the full `2^(k+ℓ)` tensor is formed, so they share nothing with the component formulas.

/// Full tensor over index tuples; tuple `t` has digit `s` (value 0 or 1, meaning index 1 or 2) at bit `s`.
/// Slots `0..k` form the first group.
#[derive(Debug, Clone)]
pub(super) struct Full {
    pub k: usize,
    pub l: usize,
    pub v: Vec<f64>,
}

fn popcount(t: usize, from: usize, len: usize) -> usize {
    ((t >> from) & ((1usize << len) - 1)).count_ones() as usize
}

impl Full {
    fn zeros(k: usize, l: usize) -> Self {
        Full { k, l, v: vec![0.0; 1 << (k + l)] }
    }

    pub fn expand(k: usize, l: usize, comps: &[f64]) -> Self {
        let mut f = Full::zeros(k, l);
        for t in 0..f.v.len() {
            f.v[t] = comps[popcount(t, 0, k) * (l + 1) + popcount(t, k, l)];
        }
        f
    }

    pub fn canonical(&self) -> Vec<f64> {
        let (k, l) = (self.k, self.l);
        (0..=k).flat_map(|p| (0..=l).map(move |q| ((1 << p) - 1) | (((1 << q) - 1) << k))).map(|t| self.v[t]).collect()
    }

    fn digit(t: usize, s: usize) -> usize {
        (t >> s) & 1
    }
}

/// Sum over all permutations of slots `from..from+len`, divided by their number.
fn average_perms(t: &Full, from: usize, len: usize) -> Full {
    let mut perm: Vec<usize> = (0..len).collect();
    let mut all = Vec::new();
    heap(len, &mut perm, &mut all);
    let mut out = Full::zeros(t.k, t.l);
    for idx in 0..t.v.len() {
        let mut acc = 0.0;
        for p in &all {
            let mut j = idx & !(((1 << len) - 1) << from);
            for (s, &ps) in p.iter().enumerate() {
                j |= Full::digit(idx, from + ps) << (from + s);
            }
            acc += t.v[j];
        }
        out.v[idx] = acc / all.len() as f64;
    }
    out
}

fn heap(n: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if n <= 1 {
        out.push(a.clone());
        return;
    }
    for i in 0..n - 1 {
        heap(n - 1, a, out);
        if n.is_multiple_of(2) {
            a.swap(i, n - 1);
        } else {
            a.swap(0, n - 1);
        }
    }
    heap(n - 1, a, out);
}

pub(super) fn sym(t: &Full) -> Vec<f64> {
    let s = average_perms(t, 0, t.k + t.l);
    (0..=t.k + t.l).map(|p| s.v[(1 << p) - 1]).collect()
}

pub(super) fn apply_a(t: &Full) -> Full {
    let mask = ((1 << t.l) - 1) << t.k;
    let mut out = Full::zeros(t.k, t.l);
    for idx in 0..t.v.len() {
        let twos = popcount(idx, t.k, t.l);
        out.v[idx] = if twos.is_multiple_of(2) { t.v[idx ^ mask] } else { -t.v[idx ^ mask] };
    }
    out
}

pub(super) fn lambda(w: &Full) -> Full {
    let (k, l) = (w.k + 1, w.l + 1);
    let mut raw = Full::zeros(k, l);
    for idx in 0..raw.v.len() {
        if Full::digit(idx, 0) != Full::digit(idx, k) {
            continue;
        }
        let first = (idx >> 1) & ((1 << (k - 1)) - 1);
        let second = (idx >> (k + 1)) & ((1 << (l - 1)) - 1);
        raw.v[idx] = w.v[first | (second << (k - 1))];
    }
    average_perms(&average_perms(&raw, 0, k), k, l)
}

pub(super) fn mu(f: &Full) -> Full {
    let (k, l) = (f.k - 1, f.l - 1);
    let mut out = Full::zeros(k, l);
    for idx in 0..out.v.len() {
        let first = idx & ((1 << k) - 1);
        let second = idx >> k;
        out.v[idx] = (0..2).map(|a| f.v[first | (a << k) | (second << (k + 1)) | (a << (k + 1 + l))]).sum();
    }
    out
}

/// `σ(i) ∂_{i₁} u`, given `∂₁u` and `∂₂u` as full tensors.
pub(super) fn dprime(d1: &Full, d2: &Full) -> Full {
    let (k, l) = (d1.k + 1, d1.l);
    let mut raw = Full::zeros(k, l);
    for idx in 0..raw.v.len() {
        let src = if Full::digit(idx, 0) == 0 { d1 } else { d2 };
        raw.v[idx] = src.v[idx >> 1];
    }
    average_perms(&raw, 0, k)
}

/// `Σ_a ∂_a f_{a…}`, given `∂₁f` and `∂₂f`.
pub(super) fn delta_prime(d1: &Full, d2: &Full) -> Full {
    let (k, l) = (d1.k - 1, d1.l);
    let mut out = Full::zeros(k, l);
    for idx in 0..out.v.len() {
        out.v[idx] = d1.v[idx << 1] + d2.v[(idx << 1) | 1];
    }
    out
}
