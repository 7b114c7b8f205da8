//! Test-only helpers: random fields and a brute-force tensor oracle that works on all `2^(k+ℓ)` index tuples.
#![allow(dead_code, clippy::needless_range_loop)]

use mirt::grid::GridSpec;
use mirt::tensor::{ComponentIndex, MixedTensorField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent uniform samples in every stored component.
pub fn random_field(k: usize, l: usize, grid: GridSpec, seed: u64) -> MixedTensorField {
    let mut r = rng(seed);
    MixedTensorField::from_fn(k, l, grid, |_, _, _| r.random_range(-1.0..1.0))
}

/// Smooth field: a random Gaussian blob per component, decaying well inside the grid.
pub fn smooth_field(k: usize, l: usize, grid: GridSpec, seed: u64) -> MixedTensorField {
    let mut r = rng(seed);
    let a = grid.half_width();
    let params: Vec<(f64, f64, f64, f64)> = ComponentIndex::all(k, l)
        .map(|_| (r.random_range(-1.0..1.0), r.random_range(-0.2..0.2) * a, r.random_range(-0.2..0.2) * a, r.random_range(0.08..0.12) * a))
        .collect();
    MixedTensorField::from_fn(k, l, grid, |c, x, y| {
        let (amp, cx, cy, s) = params[c.offset(l)];
        amp * (-((x - cx).powi(2) + (y - cy).powi(2)) / (s * s)).exp()
    })
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

// ---- brute-force full tensors -------------------------------------------------------------------------

/// A full tensor with `k` first-group and `l` second-group slots over index values {1, 2}.
/// Entry `bits` has bit `s` set when slot `s` holds the value 2; slots `0..k` are the first group.
#[derive(Debug, Clone)]
pub struct Full {
    pub k: usize,
    pub l: usize,
    pub v: Vec<f64>,
}

fn twos(bits: usize, from: usize, len: usize) -> usize {
    ((bits >> from) & ((1 << len) - 1)).count_ones() as usize
}

impl Full {
    pub fn zeros(k: usize, l: usize) -> Self {
        Full { k, l, v: vec![0.0; 1 << (k + l)] }
    }

    /// Expands stored components (`comp[c]` in plane order) to every index tuple.
    pub fn from_components(k: usize, l: usize, comp: &[f64]) -> Self {
        let mut f = Full::zeros(k, l);
        for bits in 0..f.v.len() {
            let (p, q) = (twos(bits, 0, k), twos(bits, k, l));
            f.v[bits] = comp[p * (l + 1) + q];
        }
        f
    }

    /// Reads the canonical components back.
    pub fn components(&self) -> Vec<f64> {
        let (k, l) = (self.k, self.l);
        ComponentIndex::all(k, l)
            .map(|c| {
                let bits = ((1 << c.p) - 1) | (((1 << c.q) - 1) << k);
                self.v[bits]
            })
            .collect()
    }

    fn get(&self, slots: &[usize]) -> f64 {
        self.v[slots.iter().enumerate().fold(0, |acc, (s, &val)| acc | (val << s))]
    }

    fn slots(&self, bits: usize) -> Vec<usize> {
        (0..self.k + self.l).map(|s| (bits >> s) & 1).collect()
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Average over permutations of slots `from..from+len`.
fn symmetrize_range(t: &Full, from: usize, len: usize) -> Full {
    let perms = permutations(len);
    let mut out = Full::zeros(t.k, t.l);
    for bits in 0..t.v.len() {
        let slots = t.slots(bits);
        let mut acc = 0.0;
        for p in &perms {
            let mut s = slots.clone();
            for i in 0..len {
                s[from + i] = slots[from + p[i]];
            }
            acc += t.get(&s);
        }
        out.v[bits] = acc / perms.len() as f64;
    }
    out
}

/// σ over all `k+ℓ` slots; the result is read as a `(k+ℓ, 0)` tensor.
pub fn sym_full(t: &Full) -> Full {
    let mut s = symmetrize_range(t, 0, t.k + t.l);
    s.k += s.l;
    s.l = 0;
    s
}

/// `(Af)_{i,j} = (−1)^{ℓ − #1(j)} f_{i, swap(j)}`.
pub fn apply_a(t: &Full) -> Full {
    let mut out = Full::zeros(t.k, t.l);
    for bits in 0..t.v.len() {
        let ones = t.l - twos(bits, t.k, t.l);
        let swapped = bits ^ (((1 << t.l) - 1) << t.k);
        let sign = if (t.l - ones).is_multiple_of(2) { 1.0 } else { -1.0 };
        out.v[bits] = sign * t.v[swapped];
    }
    out
}

/// `σ(i)σ(j) δ_{i₁j₁} w_{i₂…, j₂…}`.
pub fn lambda(w: &Full) -> Full {
    let (k, l) = (w.k + 1, w.l + 1);
    let mut raw = Full::zeros(k, l);
    for bits in 0..raw.v.len() {
        let s = raw.slots(bits);
        if s[0] != s[k] {
            continue;
        }
        let mut rest: Vec<usize> = s[1..k].to_vec();
        rest.extend_from_slice(&s[k + 1..]);
        raw.v[bits] = w.get(&rest);
    }
    symmetrize_range(&symmetrize_range(&raw, 0, k), k, l)
}

/// Trace of the last first-group slot against the last second-group slot.
pub fn mu(f: &Full) -> Full {
    let (k, l) = (f.k - 1, f.l - 1);
    let mut out = Full::zeros(k, l);
    for bits in 0..out.v.len() {
        let s = out.slots(bits);
        let mut acc = 0.0;
        for a in 0..2 {
            let mut full: Vec<usize> = s[..k].to_vec();
            full.push(a);
            full.extend_from_slice(&s[k..]);
            full.push(a);
            acc += f.get(&full);
        }
        out.v[bits] = acc;
    }
    out
}

/// `σ(i) ∂_{i₁} u_{i₂…i_k, j}` given the two partial derivatives of `u` as full tensors.
pub fn dprime(du: [&Full; 2]) -> Full {
    let (k, l) = (du[0].k + 1, du[0].l);
    let mut raw = Full::zeros(k, l);
    for bits in 0..raw.v.len() {
        let s = raw.slots(bits);
        raw.v[bits] = du[s[0]].get(&s[1..]);
    }
    symmetrize_range(&raw, 0, k)
}

/// `Σ_a ∂_a f_{a i₂…, j}` given the two partial derivatives of `f`.
pub fn delta_prime(df: [&Full; 2]) -> Full {
    let (k, l) = (df[0].k - 1, df[0].l);
    let mut out = Full::zeros(k, l);
    for bits in 0..out.v.len() {
        let s = out.slots(bits);
        let mut acc = 0.0;
        for a in 0..2 {
            let mut full = vec![a];
            full.extend_from_slice(&s);
            acc += df[a].get(&full);
        }
        out.v[bits] = acc;
    }
    out
}

/// Components of `f` at pixel `(i, j)`.
pub fn at(f: &MixedTensorField, i: usize, j: usize) -> Vec<f64> {
    f.data().outer_iter().map(|p| p[[i, j]]).collect()
}

pub fn max_rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let scale = a.iter().chain(b).fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale
}
