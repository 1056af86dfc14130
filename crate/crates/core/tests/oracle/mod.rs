//! Slow, independent reference implementations used by the integration and
//! acceptance tests.
#![allow(dead_code)]

use sublevelstat::complex::{Simplex, SimplicialComplex};
use sublevelstat::persistence::{PersistenceDiagram, PersistencePair};
use sublevelstat::synth::SeededStream;

fn linf(p: (f64, f64), q: (f64, f64)) -> f64 {
    (p.0 - q.0).abs().max((p.1 - q.1).abs())
}

/// Bottleneck distance between finite point sets by enumerating every partial
/// injection `a -> b`; unmatched points pay their distance to the diagonal.
pub fn bottleneck_brute(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    fn go(i: usize, a: &[(f64, f64)], b: &[(f64, f64)], used: &mut Vec<bool>, cost: f64, best: &mut f64) {
        if cost >= *best {
            return;
        }
        if i == a.len() {
            let rest = b
                .iter()
                .zip(used.iter())
                .filter(|(_, &u)| !u)
                .map(|(q, _)| (q.1 - q.0) / 2.0)
                .fold(cost, f64::max);
            *best = best.min(rest);
            return;
        }
        go(i + 1, a, b, used, cost.max((a[i].1 - a[i].0) / 2.0), best);
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                go(i + 1, a, b, used, cost.max(linf(a[i], b[j])), best);
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    go(0, a, b, &mut vec![false; b.len()], 0.0, &mut best);
    best
}

/// Full bottleneck distance in degree `k`, essential classes included.
pub fn bottleneck_brute_degree(x: &PersistenceDiagram, y: &PersistenceDiagram, k: usize) -> f64 {
    let (ex, ey) = (x.essential_births(k), y.essential_births(k));
    if ex.len() != ey.len() {
        return f64::INFINITY;
    }
    let essential = min_over_permutations(&ex, &ey);
    bottleneck_brute(&x.finite_points(k), &y.finite_points(k)).max(essential)
}

fn min_over_permutations(x: &[f64], y: &[f64]) -> f64 {
    fn go(i: usize, x: &[f64], y: &[f64], used: &mut Vec<bool>, cost: f64) -> f64 {
        if i == x.len() {
            return cost;
        }
        let mut best = f64::INFINITY;
        for j in 0..y.len() {
            if !used[j] {
                used[j] = true;
                best = best.min(go(i + 1, x, y, used, cost.max((x[i] - y[j]).abs())));
                used[j] = false;
            }
        }
        best
    }
    if x.is_empty() {
        return 0.0;
    }
    go(0, x, y, &mut vec![false; y.len()], 0.0)
}

/// GF(2) vectors as bitmasks; at most 128 simplices per dimension.
fn reduce_into(basis: &mut Vec<u128>, mut v: u128) -> bool {
    for &b in basis.iter() {
        let top = 127 - b.leading_zeros();
        if v >> top & 1 == 1 {
            v ^= b;
        }
    }
    if v == 0 {
        return false;
    }
    basis.push(v);
    basis.sort_unstable_by(|x, y| y.cmp(x));
    true
}

fn rank(vectors: impl IntoIterator<Item = u128>) -> usize {
    let mut basis = Vec::new();
    vectors.into_iter().filter(|&v| reduce_into(&mut basis, v)).count()
}

fn chain_mask(c: &SimplicialComplex, k: usize, faces: &[Simplex]) -> u128 {
    let all = c.simplices(k);
    faces.iter().fold(0, |m, f| {
        let i = all.iter().position(|s| s == f).expect("face in complex");
        m | 1u128 << i
    })
}

/// Basis of the degree-`k` cycles supported on the `k`-simplices selected by
/// `keep`, as masks over all `k`-simplices of `c`.
fn cycle_basis(c: &SimplicialComplex, k: usize, keep: &dyn Fn(&Simplex) -> bool) -> Vec<u128> {
    let simplices = c.simplices(k);
    assert!(simplices.len() <= 128, "oracle handles at most 128 simplices per dimension");
    // eliminate on [boundary | identity] and keep combinations whose boundary vanishes
    let mut rows: Vec<(u128, u128)> = simplices
        .iter()
        .enumerate()
        .filter(|(_, s)| keep(s))
        .map(|(i, s)| {
            let bd = if k == 0 { 0 } else { chain_mask(c, k - 1, &s.faces()) };
            (bd, 1u128 << i)
        })
        .collect();
    let mut cycles = Vec::new();
    while let Some((bd, comb)) = rows.pop() {
        if bd == 0 {
            cycles.push(comb);
            continue;
        }
        let top = 127 - bd.leading_zeros();
        for r in rows.iter_mut() {
            if r.0 >> top & 1 == 1 {
                r.0 ^= bd;
                r.1 ^= comb;
            }
        }
    }
    cycles
}

fn boundaries(c: &SimplicialComplex, k: usize, keep: &dyn Fn(&Simplex) -> bool) -> Vec<u128> {
    c.simplices(k + 1)
        .iter()
        .filter(|s| keep(s))
        .map(|s| chain_mask(c, k, &s.faces()))
        .collect()
}

/// Rank of `H_k(K_a) -> H_k(K_b)` where `K_r` holds simplices whose highest
/// vertex value is at most `r`: `dim(Z_k(K_a) + B_k(K_b)) − dim B_k(K_b)`.
pub fn persistent_betti_oracle(c: &SimplicialComplex, values: &[f64], k: usize, a: f64, b: f64) -> usize {
    let level = |s: &Simplex| s.vertices().iter().map(|&v| values[v]).fold(f64::NEG_INFINITY, f64::max);
    let z = cycle_basis(c, k, &|s| level(s) <= a);
    let bd = boundaries(c, k, &|s| level(s) <= b);
    rank(z.iter().chain(&bd).copied()) - rank(bd)
}

/// Betti numbers by the same rank computation on the whole complex.
pub fn betti_oracle(c: &SimplicialComplex) -> Vec<usize> {
    let top = c.top_dim().map_or(0, |d| d + 1);
    (0..top)
        .map(|k| {
            let z = cycle_basis(c, k, &|_| true);
            let bd = boundaries(c, k, &|_| true);
            rank(z.iter().chain(&bd).copied()) - rank(bd)
        })
        .collect()
}

/// Random closed complex on vertices `0..nv` (all present) with at most
/// `max_len` simplices, top dimension up to 3.
pub fn random_complex(rng: &mut SeededStream, max_len: usize) -> SimplicialComplex {
    let below = |rng: &mut SeededStream, n: usize| ((rng.uniform() * n as f64) as usize).min(n - 1);
    let nv = 3 + below(rng, 5);
    let mut c = SimplicialComplex::closure((0..nv).map(Simplex::vertex));
    if rng.uniform() < 1.0 / 3.0 {
        // cone over the cycle 0..nv-1 with apex nv-1: holes that die later
        let len = nv - 1;
        let cone = (0..len).map(|i| Simplex::new(vec![i, (i + 1) % len, nv - 1]).unwrap());
        let candidate = SimplicialComplex::closure(c.iter().cloned().chain(cone));
        if candidate.len() <= max_len && len >= 3 {
            c = candidate;
        }
    }
    let extra = below(rng, 12);
    for _ in 0..extra {
        let u = rng.uniform();
        let size = if u < 0.6 { 2 } else if u < 0.9 { 3 } else { 4 };
        let mut vs: Vec<usize> = (0..nv).collect();
        for i in 0..nv {
            let j = i + below(rng, nv - i);
            vs.swap(i, j);
        }
        vs.truncate(size.min(nv));
        let candidate = SimplicialComplex::closure(c.iter().cloned().chain([Simplex::new(vs).unwrap()]));
        if candidate.len() <= max_len {
            c = candidate;
        }
    }
    c
}

/// Vertex values drawn from a small integer grid so that ties are common.
/// Half the time the last vertex (the cone apex, when there is one) is lifted
/// above the grid so that holes are filled late.
pub fn random_values(rng: &mut SeededStream, n: usize, levels: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| ((rng.uniform() * levels as f64) as usize).min(levels - 1) as f64).collect();
    if rng.uniform() < 0.5 {
        v[n - 1] = levels as f64;
    }
    v
}

/// Up to `max` points in degree 0, on a coarse grid so that ties and equal
/// costs are common; roughly one in five is essential.
pub fn random_diagram(rng: &mut SeededStream, max: usize) -> PersistenceDiagram {
    let count = ((rng.uniform() * (max + 1) as f64) as usize).min(max);
    let pairs = (0..count).map(|_| {
        let birth = (rng.uniform() * 8.0).floor() / 4.0;
        let death = if rng.uniform() < 0.2 {
            f64::INFINITY
        } else {
            birth + (rng.uniform() * 8.0).floor() / 4.0 + 0.25
        };
        PersistencePair::new(0, birth, death)
    });
    PersistenceDiagram::new(pairs).unwrap()
}

/// Two random diagrams with the same number of essential classes.
pub fn comparable_diagrams(rng: &mut SeededStream, max: usize) -> (PersistenceDiagram, PersistenceDiagram) {
    loop {
        let (a, b) = (random_diagram(rng, max), random_diagram(rng, max));
        if a.essential_births(0).len() == b.essential_births(0).len() {
            return (a, b);
        }
    }
}

/// Distinct values, midpoints between them, one value below, and `+∞`.
pub fn critical_grid(values: &[f64]) -> Vec<f64> {
    let mut g: Vec<f64> = values.to_vec();
    g.sort_by(f64::total_cmp);
    g.dedup();
    let mut out = vec![g[0] - 1.0];
    for w in g.windows(2) {
        out.push(w[0]);
        out.push((w[0] + w[1]) / 2.0);
    }
    out.push(*g.last().unwrap());
    out.push(f64::INFINITY);
    out
}
