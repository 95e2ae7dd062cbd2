//! Fusion rings, Perron–Frobenius dimensions, finite-group representations
//! with explicit conjugate-equation solutions, Frobenius conjugation of
//! intertwiners, and the canonical-endomorphism checker.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};

use crate::error::{domain, Error, Result};
use crate::linalg::{self, c, CMat, CVec, Spectral, ONE, ZERO};

// ---------------------------------------------------------------------------
// Finite groups

/// Finite group given by a 0-indexed Cayley table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Group {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

impl Group {
    pub fn new(table: Vec<Vec<usize>>) -> Result<Group> {
        let n = table.len();
        if n == 0 {
            return domain("empty group table");
        }
        if n > 1024 {
            return domain("group order above 1024 is not supported");
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return domain(format!("row {i} has length {}, expected {n}", row.len()));
            }
            if let Some(&bad) = row.iter().find(|&&x| x >= n) {
                return domain(format!("entry {bad} out of range in row {i}"));
            }
            let mut seen = vec![false; n];
            for &x in row {
                if seen[x] {
                    return domain(format!("row {i} is not a permutation"));
                }
                seen[x] = true;
            }
        }
        for j in 0..n {
            let mut seen = vec![false; n];
            for row in &table {
                if seen[row[j]] {
                    return domain(format!("column {j} is not a permutation"));
                }
                seen[row[j]] = true;
            }
        }
        let Some(identity) = (0..n).find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x)) else {
            return domain("table has no identity element");
        };
        let inverse: Vec<usize> = (0..n)
            .map(|g| (0..n).find(|&h| table[g][h] == identity).expect("latin square has inverses"))
            .collect();
        let g = Group { table, identity, inverse };
        // Light's test on a generating set suffices for associativity.
        let gens = g.generators();
        for &s in &gens {
            for x in 0..n {
                for y in 0..n {
                    if g.mul(g.mul(x, s), y) != g.mul(x, g.mul(s, y)) {
                        return domain(format!("table is not associative at ({x}, {s}, {y})"));
                    }
                }
            }
        }
        Ok(g)
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    /// Greedy generating set.
    pub fn generators(&self) -> Vec<usize> {
        let n = self.order();
        let mut gens = Vec::new();
        let mut span = vec![false; n];
        span[self.identity] = true;
        let mut members = vec![self.identity];
        for g in 0..n {
            if span[g] {
                continue;
            }
            gens.push(g);
            // closure of the current span under right multiplication by gens
            let mut frontier = members.clone();
            while let Some(x) = frontier.pop() {
                for &s in &gens {
                    let y = self.mul(x, s);
                    if !span[y] {
                        span[y] = true;
                        members.push(y);
                        frontier.push(y);
                    }
                }
            }
            // new generator must also act on old members
            let mut frontier = members.clone();
            while let Some(x) = frontier.pop() {
                for &s in &gens {
                    let y = self.mul(x, s);
                    if !span[y] {
                        span[y] = true;
                        members.push(y);
                        frontier.push(y);
                    }
                }
            }
        }
        gens
    }

    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let n = self.order();
        let mut class_of = vec![usize::MAX; n];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for g in 0..n {
            if class_of[g] != usize::MAX {
                continue;
            }
            let id = classes.len();
            let mut cls = Vec::new();
            for h in 0..n {
                let x = self.mul(self.mul(h, g), self.inv(h));
                if class_of[x] == usize::MAX {
                    class_of[x] = id;
                    cls.push(x);
                }
            }
            cls.sort_unstable();
            classes.push(cls);
        }
        classes
    }

    pub fn centralizer(&self, g: usize) -> Vec<usize> {
        (0..self.order()).filter(|&h| self.mul(g, h) == self.mul(h, g)).collect()
    }

    /// Subgroup on the listed elements, reindexed in the given order.
    pub fn subgroup(&self, elements: &[usize]) -> Result<Group> {
        let pos: BTreeMap<usize, usize> = elements.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        let mut table = Vec::with_capacity(elements.len());
        for &a in elements {
            let mut row = Vec::with_capacity(elements.len());
            for &b in elements {
                let Some(&p) = pos.get(&self.mul(a, b)) else {
                    return domain("element list is not closed under multiplication");
                };
                row.push(p);
            }
            table.push(row);
        }
        Group::new(table)
    }

    pub fn cyclic(n: usize) -> Group {
        let n = n.max(1);
        Group::new((0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect()).expect("cyclic table")
    }

    /// Group of a permutation list closed under composition; `(p·q)(x) = p(q(x))`.
    pub fn from_permutations(perms: &[Vec<usize>]) -> Result<Group> {
        let index: BTreeMap<&Vec<usize>, usize> = perms.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let mut table = Vec::with_capacity(perms.len());
        for p in perms {
            let mut row = Vec::with_capacity(perms.len());
            for q in perms {
                let pq: Vec<usize> = q.iter().map(|&x| p[x]).collect();
                let Some(&k) = index.get(&pq) else {
                    return domain("permutations are not closed under composition");
                };
                row.push(k);
            }
            table.push(row);
        }
        Group::new(table)
    }

    /// `S_m` in lexicographic order of permutations.
    pub fn symmetric(m: usize) -> Group {
        let mut perms = Vec::new();
        let mut p: Vec<usize> = (0..m).collect();
        loop {
            perms.push(p.clone());
            // next lexicographic permutation
            let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else { break };
            let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
            p.swap(i - 1, j);
            p[i..].reverse();
        }
        Group::from_permutations(&perms).expect("symmetric group")
    }

    pub fn quaternion() -> Group {
        matrix_group(&quaternion_generators()).expect("Q8").0
    }

    pub fn dihedral(n: usize) -> Group {
        let n = n.max(3);
        let r: Vec<usize> = (0..n).map(|x| (x + 1) % n).collect();
        let s: Vec<usize> = (0..n).map(|x| (n - x) % n).collect();
        Group::from_permutations(&close_permutations(&[r, s])).expect("dihedral group")
    }
}

fn close_permutations(gens: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let m = gens[0].len();
    let id: Vec<usize> = (0..m).collect();
    let mut all = vec![id.clone()];
    let mut seen = std::collections::BTreeSet::new();
    seen.insert(id);
    let mut k = 0;
    while k < all.len() {
        let p = all[k].clone();
        for g in gens {
            let q: Vec<usize> = g.iter().map(|&x| p[x]).collect();
            if seen.insert(q.clone()) {
                all.push(q);
            }
        }
        k += 1;
    }
    all
}

fn quaternion_generators() -> Vec<CMat> {
    let i = CMat::from_row_slice(2, 2, &[c(0.0, 1.0), ZERO, ZERO, c(0.0, -1.0)]);
    let j = CMat::from_row_slice(2, 2, &[ZERO, ONE, -ONE, ZERO]);
    vec![i, j]
}

/// Closure of a set of unitary matrices: the group and its defining
/// representation, with the identity first.
pub fn matrix_group(generators: &[CMat]) -> Result<(Group, RepObject)> {
    let n = generators.first().map(|g| g.nrows()).unwrap_or(1);
    let mut elems = vec![linalg::eye(n)];
    let find = |elems: &Vec<CMat>, m: &CMat| elems.iter().position(|e| linalg::max_abs(&(e - m)) < 1e-9);
    let mut k = 0;
    while k < elems.len() {
        for g in generators {
            let m = &elems[k] * g;
            if find(&elems, &m).is_none() {
                if elems.len() >= 1024 {
                    return domain("matrix group is too large or infinite");
                }
                elems.push(m);
            }
        }
        k += 1;
    }
    let mut table = Vec::with_capacity(elems.len());
    for a in &elems {
        let mut row = Vec::with_capacity(elems.len());
        for b in &elems {
            row.push(find(&elems, &(a * b)).ok_or_else(|| Error::Domain("matrix set not closed".into()))?);
        }
        table.push(row);
    }
    let g = Arc::new(Group::new(table)?);
    let rep = RepObject::new(g.clone(), elems)?;
    Ok(((*g).clone(), rep))
}

// ---------------------------------------------------------------------------
// Characters

#[derive(Clone, Debug)]
pub struct CharacterTable {
    pub classes: Vec<Vec<usize>>,
    pub class_of: Vec<usize>,
    /// `chars[i][k]`: irreducible character `i` on class `k`; index 0 is trivial.
    pub chars: Vec<Vec<Complex64>>,
    pub identity: usize,
}

impl CharacterTable {
    pub fn dims(&self) -> Vec<usize> {
        self.chars.iter().map(|ch| ch[self.class_of_identity()].re.round() as usize).collect()
    }

    fn class_of_identity(&self) -> usize {
        self.class_of[self.identity]
    }

    pub fn order(&self) -> usize {
        self.class_of.len()
    }

    /// `⟨f, g⟩ = |G|^{-1} Σ_x f(x) conj(g(x))` for class functions.
    pub fn inner(&self, f: &[Complex64], g: &[Complex64]) -> Complex64 {
        let s: Complex64 = self
            .classes
            .iter()
            .enumerate()
            .map(|(k, cl)| f[k] * g[k].conj() * cl.len() as f64)
            .sum();
        s / self.order() as f64
    }

    /// `max |⟨χ_i, χ_j⟩ − δ_ij|`.
    pub fn orthogonality_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.chars.iter().enumerate() {
            for (j, b) in self.chars.iter().enumerate() {
                let want = if i == j { ONE } else { ZERO };
                worst = worst.max((self.inner(a, b) - want).norm());
            }
        }
        worst
    }
}

/// Irreducible characters from a simultaneous eigendecomposition of the
/// class-sum convolution operators, symmetrized into one Hermitian matrix with
/// random coefficients.
pub fn character_table(g: &Group) -> Result<CharacterTable> {
    let classes = g.conjugacy_classes();
    let k = classes.len();
    let n = g.order();
    let mut class_of = vec![0; n];
    for (i, cl) in classes.iter().enumerate() {
        for &x in cl {
            class_of[x] = i;
        }
    }
    let inv_class: Vec<usize> = classes.iter().map(|cl| class_of[g.inv(cl[0])]).collect();
    let reps: Vec<usize> = classes.iter().map(|cl| cl[0]).collect();
    let is_rep: Vec<Option<usize>> = {
        let mut v = vec![None; n];
        for (m, &r) in reps.iter().enumerate() {
            v[r] = Some(m);
        }
        v
    };
    // count[j][l][m] would be k^3; accumulate the weighted sum directly.
    let mut rng = rand::rngs::StdRng::seed_from_u64(0xc1a55);
    for _attempt in 0..6 {
        let coef: Vec<Complex64> = (0..k).map(|_| c(rng.random_range(-1.0..1.0), 0.0)).collect();
        let coef_im: Vec<f64> = (0..k).map(|_| rng.random_range(-1.0..1.0)).collect();
        // weight of K_j in A: a_j (K_j + K_{j*}) + i b_j (K_j − K_{j*})
        let mut wj = vec![ZERO; k];
        for j in 0..k {
            let jj = inv_class[j];
            wj[j] += coef[j];
            wj[jj] += coef[j];
            wj[j] += c(0.0, coef_im[j]);
            wj[jj] -= c(0.0, coef_im[j]);
        }
        let mut a = CMat::zeros(k, k);
        for y in 0..n {
            let wy = wj[class_of[y]];
            if wy == ZERO {
                continue;
            }
            for z in 0..n {
                if let Some(m) = is_rep[g.mul(y, z)] {
                    // K_y maps 1_{C_l} with z ∈ C_l onto the class of yz
                    a[(m, class_of[z])] += wy;
                }
            }
        }
        // orthonormal basis e_j = 1_{C_j} √(|G|/|C_j|)
        let sz: Vec<f64> = classes.iter().map(|cl| cl.len() as f64).collect();
        let a = CMat::from_fn(k, k, |m, l| a[(m, l)] * (sz[m] / sz[l]).sqrt());
        let spec = Spectral::new(&a);
        let mut vals = spec.values.clone();
        vals.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let gap = vals.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        if k > 1 && gap < 1e-6 {
            continue;
        }
        let e_class = class_of[g.identity()];
        let mut chars = Vec::with_capacity(k);
        for col in 0..k {
            let w = spec.vectors.column(col);
            let mut ch: Vec<Complex64> = (0..k).map(|m| w[m] * (n as f64 / sz[m]).sqrt()).collect();
            let ph = ch[e_class] / ch[e_class].norm();
            for x in ch.iter_mut() {
                *x /= ph;
            }
            for x in ch.iter_mut() {
                let re = if (x.re - x.re.round()).abs() < 1e-10 { x.re.round() } else { x.re };
                let im = if (x.im - x.im.round()).abs() < 1e-10 { x.im.round() } else { x.im };
                *x = c(re, im);
            }
            chars.push(ch);
        }
        // trivial character first, then by degree
        chars.sort_by(|a, b| {
            let ta = a.iter().all(|z| (z - ONE).norm() < 1e-8);
            let tb = b.iter().all(|z| (z - ONE).norm() < 1e-8);
            tb.cmp(&ta).then(a[e_class].re.partial_cmp(&b[e_class].re).unwrap())
        });
        let table = CharacterTable { classes: classes.clone(), class_of: class_of.clone(), chars, identity: g.identity() };
        if table.orthogonality_residual() < 1e-8 {
            return Ok(table);
        }
    }
    Err(Error::Numerical("character table did not separate".into()))
}

// ---------------------------------------------------------------------------
// Fusion rings

#[derive(Clone, Debug, PartialEq)]
pub struct FusionRing {
    labels: Vec<String>,
    dual: Vec<usize>,
    n: Vec<Vec<Vec<u32>>>,
}

impl FusionRing {
    /// Label 0 is the unit. `n[i][j][k] = N^k_{ij}`.
    pub fn new(labels: Vec<String>, dual: Vec<usize>, n: Vec<Vec<Vec<u32>>>) -> Result<FusionRing> {
        let r = labels.len();
        if r == 0 {
            return domain("fusion ring needs a unit");
        }
        if dual.len() != r || n.len() != r || n.iter().any(|m| m.len() != r || m.iter().any(|v| v.len() != r)) {
            return domain("fusion data has inconsistent sizes");
        }
        let fr = FusionRing { labels, dual, n };
        fr.validate()?;
        Ok(fr)
    }

    pub fn from_entries(labels: Vec<String>, dual: Vec<usize>, entries: &[(usize, usize, usize, u32)]) -> Result<FusionRing> {
        let r = labels.len();
        let mut n = vec![vec![vec![0u32; r]; r]; r];
        for &(i, j, k, m) in entries {
            if i >= r || j >= r || k >= r {
                return domain(format!("fusion entry ({i},{j},{k}) out of range"));
            }
            n[i][j][k] = m;
        }
        FusionRing::new(labels, dual, n)
    }

    fn validate(&self) -> Result<()> {
        let r = self.rank();
        for i in 0..r {
            if self.dual[i] >= r || self.dual[self.dual[i]] != i {
                return domain(format!("dual is not an involution at label {i}"));
            }
        }
        if self.dual[0] != 0 {
            return domain("unit must be self-dual");
        }
        for j in 0..r {
            for k in 0..r {
                let want = u32::from(j == k);
                if self.n[0][j][k] != want || self.n[j][0][k] != want {
                    return domain(format!("unit law fails at ({j},{k})"));
                }
            }
        }
        for i in 0..r {
            for j in 0..r {
                if self.n[i][j][0] != u32::from(j == self.dual[i]) {
                    return domain(format!("N^0_{{{i}{j}}} must be δ(j, dual i)"));
                }
            }
        }
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    for l in 0..r {
                        let a: u32 = (0..r).map(|m| self.n[i][j][m] * self.n[m][k][l]).sum();
                        let b: u32 = (0..r).map(|m| self.n[i][m][l] * self.n[j][k][m]).sum();
                        if a != b {
                            return domain(format!("associativity fails at ({i},{j},{k},{l})"));
                        }
                    }
                }
            }
        }
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    if self.n[i][j][k] != self.n[self.dual[i]][k][j] {
                        return domain(format!("Frobenius reciprocity fails at ({i},{j},{k})"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_index(&self, name: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == name)
    }

    pub fn dual(&self, i: usize) -> usize {
        self.dual[i]
    }

    pub fn n(&self, i: usize, j: usize, k: usize) -> u32 {
        self.n[i][j][k]
    }

    pub fn is_pointed(&self) -> bool {
        (0..self.rank()).all(|i| (0..self.rank()).all(|j| (0..self.rank()).map(|k| self.n[i][j][k]).sum::<u32>() == 1))
    }

    /// `(m^i)_{jk} = N^k_{ij}`.
    pub fn fusion_matrix(&self, i: usize) -> DMatrix<f64> {
        let r = self.rank();
        DMatrix::from_fn(r, r, |j, k| self.n[i][j][k] as f64)
    }

    pub fn fibonacci() -> FusionRing {
        FusionRing::from_entries(
            vec!["1".into(), "tau".into()],
            vec![0, 1],
            &[(0, 0, 0, 1), (0, 1, 1, 1), (1, 0, 1, 1), (1, 1, 0, 1), (1, 1, 1, 1)],
        )
        .expect("Fibonacci ring")
    }

    pub fn ising() -> FusionRing {
        // labels 1, sigma, psi
        FusionRing::from_entries(
            vec!["1".into(), "sigma".into(), "psi".into()],
            vec![0, 1, 2],
            &[
                (0, 0, 0, 1),
                (0, 1, 1, 1),
                (0, 2, 2, 1),
                (1, 0, 1, 1),
                (2, 0, 2, 1),
                (1, 1, 0, 1),
                (1, 1, 2, 1),
                (1, 2, 1, 1),
                (2, 1, 1, 1),
                (2, 2, 0, 1),
            ],
        )
        .expect("Ising ring")
    }

    /// Group ring of `Z_n`.
    pub fn pointed(n: usize) -> FusionRing {
        let n = n.max(1);
        let labels = (0..n).map(|i| i.to_string()).collect();
        let dual = (0..n).map(|i| (n - i) % n).collect();
        let entries: Vec<_> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j, (i + j) % n, 1))).collect();
        FusionRing::from_entries(labels, dual, &entries).expect("pointed ring")
    }

    pub fn trivial() -> FusionRing {
        FusionRing::pointed(1)
    }
}

/// Common positive eigenvector of all fusion matrices, normalized at the unit.
pub fn dimension_vector(fr: &FusionRing) -> Vec<f64> {
    let r = fr.rank();
    let mut m = DMatrix::<f64>::identity(r, r);
    for i in 0..r {
        m += fr.fusion_matrix(i);
    }
    // m is entrywise positive, so power iteration converges to the PF vector
    let mut v = nalgebra::DVector::from_element(r, 1.0);
    for _ in 0..10_000 {
        let w = &m * &v;
        let w = &w / w.norm();
        let delta = (&w - &v).amax();
        v = w;
        if delta < 1e-15 {
            break;
        }
    }
    let scale = v[0];
    v.iter().map(|x| x / scale).collect()
}

/// Perron–Frobenius eigenvalue of `m^i`.
pub fn pf_dimension(fr: &FusionRing, i: usize) -> Result<f64> {
    if i >= fr.rank() {
        return domain(format!("label {i} outside the ring"));
    }
    let d = dimension_vector(fr);
    let md = fr.fusion_matrix(i) * nalgebra::DVector::from_vec(d.clone());
    // m^i d = d_i d; read the eigenvalue off the unit component
    Ok(md[0] / d[0])
}

/// `|d_i − ‖m^i‖|` with the operator norm from the singular values.
pub fn amenability_check(fr: &FusionRing, i: usize) -> Result<f64> {
    let d = pf_dimension(fr, i)?;
    let norm = fr.fusion_matrix(i).singular_values().iter().cloned().fold(0.0, f64::max);
    Ok((d - norm).abs())
}

/// `max |d_i d_j − Σ_k N^k_{ij} d_k|`.
pub fn homomorphism_residual(fr: &FusionRing, dims: &[f64]) -> f64 {
    let r = fr.rank();
    let mut worst: f64 = 0.0;
    for i in 0..r {
        for j in 0..r {
            let rhs: f64 = (0..r).map(|k| fr.n(i, j, k) as f64 * dims[k]).sum();
            worst = worst.max((dims[i] * dims[j] - rhs).abs());
        }
    }
    worst
}

#[derive(Clone, Debug, PartialEq)]
pub struct DimensionFunctionCheck {
    pub homomorphism_residual: f64,
    pub positive: bool,
    pub distance_to_pf: f64,
    pub accepted: bool,
}

/// Accepts a candidate dimension function only if it is positive,
/// multiplicative and equal to the Perron–Frobenius vector.
pub fn check_dimension_function(fr: &FusionRing, dims: &[f64], tol: f64) -> Result<DimensionFunctionCheck> {
    if dims.len() != fr.rank() {
        return domain("one dimension per label is required");
    }
    let h = homomorphism_residual(fr, dims);
    let positive = dims.iter().all(|&x| x > 0.0);
    let pf = dimension_vector(fr);
    let dist = dims.iter().zip(&pf).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(DimensionFunctionCheck { homomorphism_residual: h, positive, distance_to_pf: dist, accepted: positive && h <= tol && dist <= tol })
}

/// Representation ring of `G`: labels are irreducible characters,
/// `N^k_{ij} = ⟨χ_i χ_j, χ_k⟩`.
pub fn rep_fusion_ring(g: &Group) -> Result<FusionRing> {
    let ct = character_table(g)?;
    rep_fusion_ring_from(&ct)
}

pub fn rep_fusion_ring_from(ct: &CharacterTable) -> Result<FusionRing> {
    let r = ct.chars.len();
    let mut n = vec![vec![vec![0u32; r]; r]; r];
    for i in 0..r {
        for j in 0..r {
            let prod: Vec<Complex64> = (0..ct.classes.len()).map(|k| ct.chars[i][k] * ct.chars[j][k]).collect();
            for k in 0..r {
                let m = ct.inner(&prod, &ct.chars[k]);
                let rounded = m.re.round();
                if (m - c(rounded, 0.0)).norm() > 1e-6 || rounded < 0.0 {
                    return Err(Error::Numerical(format!("non-integral multiplicity {m}")));
                }
                n[i][j][k] = rounded as u32;
            }
        }
    }
    let dual = (0..r)
        .map(|i| {
            let conj: Vec<Complex64> = ct.chars[i].iter().map(|z| z.conj()).collect();
            (0..r).find(|&j| ct.chars[j].iter().zip(&conj).all(|(a, b)| (a - b).norm() < 1e-8)).unwrap_or(i)
        })
        .collect();
    let labels = ct.dims().iter().enumerate().map(|(i, d)| format!("chi{i}[{d}]")).collect();
    FusionRing::new(labels, dual, n)
}

// ---------------------------------------------------------------------------
// Representations and conjugates

#[derive(Clone, Debug)]
pub struct RepObject {
    group: Arc<Group>,
    mats: Vec<CMat>,
}

impl RepObject {
    pub fn new(group: Arc<Group>, mats: Vec<CMat>) -> Result<RepObject> {
        if mats.len() != group.order() {
            return domain("one matrix per group element is required");
        }
        let n = mats[0].nrows();
        for (g, m) in mats.iter().enumerate() {
            if m.shape() != (n, n) {
                return domain(format!("matrix for element {g} has the wrong shape"));
            }
            if linalg::max_abs(&(m * m.adjoint() - linalg::eye(n))) > 1e-10 {
                return domain(format!("matrix for element {g} is not unitary"));
            }
        }
        for a in 0..group.order() {
            for b in 0..group.order() {
                if linalg::max_abs(&(&mats[a] * &mats[b] - &mats[group.mul(a, b)])) > 1e-10 {
                    return domain(format!("not a homomorphism at ({a}, {b})"));
                }
            }
        }
        Ok(RepObject { group, mats })
    }

    pub fn trivial(group: Arc<Group>) -> RepObject {
        let mats = vec![linalg::eye(1); group.order()];
        RepObject { group, mats }
    }

    /// Permutation representation from the action `g·x = action[g][x]`.
    pub fn permutation(group: Arc<Group>, action: &[Vec<usize>]) -> Result<RepObject> {
        let m = action.first().map(|p| p.len()).unwrap_or(0);
        let mats = action
            .iter()
            .map(|p| {
                let mut a = CMat::zeros(m, m);
                for (x, &y) in p.iter().enumerate() {
                    a[(y, x)] = ONE;
                }
                a
            })
            .collect();
        RepObject::new(group, mats)
    }

    /// Restriction to the invariant subspace spanned by the orthonormal columns of `basis`.
    pub fn restrict(&self, basis: &CMat) -> Result<RepObject> {
        let mats: Vec<CMat> = self.mats.iter().map(|m| basis.adjoint() * m * basis).collect();
        for (m, full) in mats.iter().zip(&self.mats) {
            if linalg::max_abs(&(full * basis - basis * m)) > 1e-10 {
                return domain("subspace is not invariant");
            }
        }
        RepObject::new(self.group.clone(), mats)
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.mats[0].nrows()
    }

    pub fn matrix(&self, g: usize) -> &CMat {
        &self.mats[g]
    }

    pub fn matrices(&self) -> &[CMat] {
        &self.mats
    }

    /// Entrywise complex conjugate.
    pub fn conjugate(&self) -> RepObject {
        RepObject { group: self.group.clone(), mats: self.mats.iter().map(|m| m.map(|z| z.conj())).collect() }
    }

    pub fn direct_sum(&self, other: &RepObject) -> RepObject {
        let (a, b) = (self.dim(), other.dim());
        let mats = self
            .mats
            .iter()
            .zip(&other.mats)
            .map(|(x, y)| {
                let mut m = CMat::zeros(a + b, a + b);
                m.view_mut((0, 0), (a, a)).copy_from(x);
                m.view_mut((a, a), (b, b)).copy_from(y);
                m
            })
            .collect();
        RepObject { group: self.group.clone(), mats }
    }

    pub fn tensor(&self, other: &RepObject) -> RepObject {
        let mats = self.mats.iter().zip(&other.mats).map(|(x, y)| linalg::kron(x, y)).collect();
        RepObject { group: self.group.clone(), mats }
    }

    pub fn character(&self) -> Vec<Complex64> {
        self.mats.iter().map(linalg::trace).collect()
    }

    /// Dimension of the self-intertwiner space `(ρ, ρ)`.
    pub fn commutant_dim(&self) -> usize {
        intertwiner_basis(self, self).len()
    }

    pub fn is_irreducible(&self) -> bool {
        self.commutant_dim() == 1
    }
}

/// The 2-dimensional irreducible representation of `S_3` (lexicographic
/// permutation order) on the sum-zero plane of `ℂ³`.
pub fn s3_standard_rep() -> RepObject {
    let g = Arc::new(Group::symmetric(3));
    let mut perms = Vec::new();
    let mut p: Vec<usize> = (0..3).collect();
    loop {
        perms.push(p.clone());
        let Some(i) = (1..3).rev().find(|&i| p[i - 1] < p[i]) else { break };
        let j = (i..3).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
    }
    let perm = RepObject::permutation(g, &perms).expect("permutation rep");
    let s2 = 2f64.sqrt();
    let s6 = 6f64.sqrt();
    let basis = CMat::from_row_slice(3, 2, &[c(1.0 / s2, 0.0), c(1.0 / s6, 0.0), c(-1.0 / s2, 0.0), c(1.0 / s6, 0.0), ZERO, c(-2.0 / s6, 0.0)]);
    perm.restrict(&basis).expect("sum-zero plane is invariant")
}

/// One-dimensional representation `g ↦ e^{2πi k g/n}` of `Z_n`.
pub fn cyclic_character_rep(n: usize, k: usize) -> RepObject {
    let g = Arc::new(Group::cyclic(n));
    let mats = (0..n)
        .map(|x| {
            let th = 2.0 * std::f64::consts::PI * (k * x) as f64 / n as f64;
            CMat::from_element(1, 1, c(th.cos(), th.sin()))
        })
        .collect();
    RepObject::new(g, mats).expect("character of Z_n")
}

/// The defining 2-dimensional representation of `Q_8` by unit quaternions.
pub fn quaternion_rep() -> RepObject {
    matrix_group(&quaternion_generators()).expect("Q8").1
}

/// Basis of `(ρ1, ρ2) = {T : T ρ1(g) = ρ2(g) T}`, each `T` of shape `n2 × n1`.
pub fn intertwiner_basis(r1: &RepObject, r2: &RepObject) -> Vec<CMat> {
    let (n1, n2) = (r1.dim(), r2.dim());
    let gens = r1.group.generators();
    let gens = if gens.is_empty() { vec![r1.group.identity()] } else { gens };
    let dim = n1 * n2;
    let mut gram = CMat::zeros(dim, dim);
    for &g in &gens {
        // vec(ρ2 T − T ρ1) in row-major form
        let a = linalg::kron(r2.matrix(g), &linalg::eye(n1)) - linalg::kron(&linalg::eye(n2), &r1.matrix(g).transpose());
        gram += a.adjoint() * a;
    }
    let spec = Spectral::new(&gram);
    let top = spec.max().max(1.0);
    (0..dim)
        .filter(|&k| spec.values[k] < 1e-9 * top)
        .map(|k| {
            let v: Vec<Complex64> = spec.vectors.column(k).iter().cloned().collect();
            linalg::unvec_row_major(&v, n2, n1)
        })
        .collect()
}

/// `max_g ‖T ρ1(g) − ρ2(g) T‖`.
pub fn intertwiner_residual(t: &CMat, r1: &RepObject, r2: &RepObject) -> f64 {
    (0..r1.group.order()).map(|g| linalg::op_norm(&(t * r1.matrix(g) - r2.matrix(g) * t))).fold(0.0, f64::max)
}

/// `R ∈ (ι, ρ̄⊗ρ)`, `R̄ ∈ (ι, ρ⊗ρ̄)` as vectors in `ℂ^n ⊗ ℂ^n` (first factor
/// slow).
#[derive(Clone, Debug)]
pub struct ConjugateSolution {
    pub rep: RepObject,
    pub r: CVec,
    pub rbar: CVec,
    pub irreducible: bool,
}

impl ConjugateSolution {
    pub fn dim(&self) -> usize {
        self.rep.dim()
    }

    /// `R → λR`, `R̄ → λ̄^{-1}R̄`.
    pub fn rescaled(&self, lambda: Complex64) -> ConjugateSolution {
        ConjugateSolution { r: &self.r * lambda, rbar: &self.rbar / lambda.conj(), ..self.clone() }
    }

    /// `(ρ̄(v)R, v*^{-1}R̄)` for invertible `v ∈ (ρ, ρ)`.
    pub fn gauged(&self, v: &CMat) -> Result<ConjugateSolution> {
        let n = self.dim();
        let Some(vinv) = v.clone().try_inverse() else {
            return domain("gauge element is not invertible");
        };
        let r = linalg::kron(&linalg::eye(n), v) * &self.r;
        let rbar = linalg::kron(&vinv.adjoint(), &linalg::eye(n)) * &self.rbar;
        Ok(ConjugateSolution { r, rbar, ..self.clone() })
    }

    /// Residuals of `(R*⊗1)(1⊗R̄) = 1` and `(R̄*⊗1)(1⊗R) = 1`.
    pub fn residuals(&self) -> (f64, f64) {
        let n = self.dim();
        let one = linalg::eye(n);
        let rcol = CMat::from_column_slice(n * n, 1, self.r.as_slice());
        let rbcol = CMat::from_column_slice(n * n, 1, self.rbar.as_slice());
        let a = linalg::kron(&rcol.adjoint(), &one) * linalg::kron(&one, &rbcol);
        let b = linalg::kron(&rbcol.adjoint(), &one) * linalg::kron(&one, &rcol);
        (linalg::op_norm(&(a - &one)), linalg::op_norm(&(b - &one)))
    }

    /// `max_g ‖(ρ̄(g)⊗ρ(g))R − R‖` and the same for `R̄`.
    pub fn invariance_residual(&self) -> f64 {
        let rho = &self.rep;
        let bar = rho.conjugate();
        (0..rho.group.order())
            .map(|g| {
                let a = linalg::kron(bar.matrix(g), rho.matrix(g)) * &self.r - &self.r;
                let b = linalg::kron(rho.matrix(g), bar.matrix(g)) * &self.rbar - &self.rbar;
                a.norm().max(b.norm())
            })
            .fold(0.0, f64::max)
    }
}

/// Standard solution `R = R̄ = Σ_i e_i ⊗ e_i` for `ρ̄` the entrywise conjugate.
pub fn solve_conjugate(rho: &RepObject) -> Result<ConjugateSolution> {
    let n = rho.dim();
    let mut r = CVec::zeros(n * n);
    for i in 0..n {
        r[i * n + i] = ONE;
    }
    Ok(ConjugateSolution { rep: rho.clone(), rbar: r.clone(), r, irreducible: rho.is_irreducible() })
}

/// Dimension of `(ι, ρ̄⊗ρ)`: 1 for irreducible objects, so solutions form a
/// single scalar gauge orbit.
pub fn conjugate_solution_space_dim(rho: &RepObject) -> usize {
    let bar = rho.conjugate();
    let unit = RepObject::trivial(rho.group.clone());
    intertwiner_basis(&unit, &bar.tensor(rho)).len()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DimensionResult {
    pub value: f64,
    /// False for reducible objects without a decomposition; the value is then
    /// an upper bound.
    pub exact: bool,
}

/// `‖R‖‖R̄‖`.
pub fn intrinsic_dimension(sol: &ConjugateSolution) -> DimensionResult {
    DimensionResult { value: sol.r.norm() * sol.rbar.norm(), exact: sol.irreducible }
}

/// Sum of the intrinsic dimensions of the irreducible summands.
pub fn intrinsic_dimension_decomposed(parts: &[ConjugateSolution]) -> Result<f64> {
    if let Some(p) = parts.iter().find(|p| !p.irreducible) {
        return domain(format!("summand of dimension {} is not irreducible", p.dim()));
    }
    Ok(parts.iter().map(|p| intrinsic_dimension(p).value).sum())
}

/// `T• = (1_{ρ̄2} ⊗ R̄1*)(1_{ρ̄2} ⊗ T* ⊗ 1_{ρ̄1})(R2 ⊗ 1_{ρ̄1}) ∈ (ρ̄1, ρ̄2)`.
pub fn frobenius_map(t: &CMat, s1: &ConjugateSolution, s2: &ConjugateSolution) -> Result<CMat> {
    let (n1, n2) = (s1.dim(), s2.dim());
    if t.shape() != (n2, n1) {
        return domain(format!("intertwiner must be {n2}x{n1}"));
    }
    let res = intertwiner_residual(t, &s1.rep, &s2.rep);
    if res > 1e-9 * (1.0 + linalg::op_norm(t)) {
        return domain(format!("T is not an intertwiner (residual {res:e})"));
    }
    let r2 = CMat::from_column_slice(n2 * n2, 1, s2.r.as_slice());
    let rb1 = CMat::from_column_slice(n1 * n1, 1, s1.rbar.as_slice());
    let first = linalg::kron(&r2, &linalg::eye(n1));
    let middle = linalg::kron(&linalg::eye(n2), &linalg::kron(&t.adjoint(), &linalg::eye(n1)));
    let last = linalg::kron(&linalg::eye(n2), &rb1.adjoint());
    Ok(last * middle * first)
}

// ---------------------------------------------------------------------------
// Canonical endomorphisms

/// Operator model in which `λ(S)S = S²` and its companions are evaluated.
pub trait EndoModel {
    type Op: Clone;
    fn one(&self) -> Self::Op;
    fn mul(&self, a: &Self::Op, b: &Self::Op) -> Self::Op;
    fn adjoint(&self, a: &Self::Op) -> Self::Op;
    fn lambda(&self, a: &Self::Op) -> Self::Op;
    fn scale(&self, a: &Self::Op, z: Complex64) -> Self::Op;
    fn dist(&self, a: &Self::Op, b: &Self::Op) -> f64;
    /// Best scalar `z` with `a ≈ z·1`, and the fit residual.
    fn scalar_part(&self, a: &Self::Op) -> (Complex64, f64);
    /// Smallest eigenvalue of the Hermitian part.
    fn min_eigenvalue(&self, a: &Self::Op) -> f64;
    fn samples(&self) -> Vec<Self::Op>;
    /// Distance of `a` from the designated subalgebra, when one is designated.
    fn membership_residual(&self, _a: &Self::Op) -> Option<f64> {
        None
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalEndoReport {
    pub multiplicativity: f64,
    /// `‖λ(S)S − S²‖`.
    pub canonical: f64,
    pub s_lambda_t: Complex64,
    pub s_lambda_t_residual: f64,
    pub t_s: Complex64,
    pub t_s_residual: f64,
    /// Distance of `S` from the designated subalgebra.
    pub membership: Option<f64>,
    /// `E = S*λ(·)S / (S*S)`: `‖E∘E − E‖`, `‖E(1) − 1‖`, and the least
    /// eigenvalue of `E(x*x)` over samples.
    pub expectation_idempotent: f64,
    pub expectation_unital: f64,
    pub expectation_min_eigenvalue: f64,
}

impl CanonicalEndoReport {
    pub fn worst_residual(&self) -> f64 {
        [
            self.multiplicativity,
            self.canonical,
            self.s_lambda_t_residual,
            self.t_s_residual,
            self.membership.unwrap_or(0.0),
            self.expectation_idempotent,
            self.expectation_unital,
            (-self.expectation_min_eigenvalue).max(0.0),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn canonical_endo_check<M: EndoModel>(model: &M, t: &M::Op, s: &M::Op) -> Result<CanonicalEndoReport> {
    let samples = model.samples();
    let mut mult: f64 = 0.0;
    for a in &samples {
        for b in &samples {
            let lhs = model.lambda(&model.mul(a, b));
            let rhs = model.mul(&model.lambda(a), &model.lambda(b));
            mult = mult.max(model.dist(&lhs, &rhs));
        }
        mult = mult.max(model.dist(&model.lambda(&model.adjoint(a)), &model.adjoint(&model.lambda(a))));
    }
    if mult > 1e-8 {
        return domain(format!("λ is not a *-homomorphism on samples (residual {mult:e})"));
    }
    let canonical = model.dist(&model.mul(&model.lambda(s), s), &model.mul(s, s));
    let (slt, slt_res) = model.scalar_part(&model.mul(&model.adjoint(s), &model.lambda(t)));
    let (ts, ts_res) = model.scalar_part(&model.mul(&model.adjoint(t), s));
    let (norm, norm_res) = model.scalar_part(&model.mul(&model.adjoint(s), s));
    if norm.norm() < 1e-12 || norm_res > 1e-8 {
        return domain("S is not a multiple of an isometry");
    }
    let e = |x: &M::Op| model.scale(&model.mul(&model.mul(&model.adjoint(s), &model.lambda(x)), s), ONE / norm);
    let mut idem: f64 = 0.0;
    let mut min_eig = f64::INFINITY;
    for x in &samples {
        let ex = e(x);
        idem = idem.max(model.dist(&e(&ex), &ex));
        min_eig = min_eig.min(model.min_eigenvalue(&e(&model.mul(&model.adjoint(x), x))));
    }
    let unital = model.dist(&e(&model.one()), &model.one());
    Ok(CanonicalEndoReport {
        multiplicativity: mult,
        canonical,
        s_lambda_t: slt,
        s_lambda_t_residual: slt_res,
        t_s: ts,
        t_s_residual: ts_res,
        membership: model.membership_residual(s),
        expectation_idempotent: idem,
        expectation_unital: unital,
        expectation_min_eigenvalue: min_eig,
    })
}

/// `λ` given as an explicit map on `M_n`.
pub struct MatrixEndoModel {
    pub n: usize,
    pub lambda: Box<dyn Fn(&CMat) -> CMat + Send + Sync>,
    pub samples: Vec<CMat>,
    /// Spanning set of the designated subalgebra.
    pub subalgebra: Option<Vec<CMat>>,
}

impl MatrixEndoModel {
    pub fn new(n: usize, lambda: Box<dyn Fn(&CMat) -> CMat + Send + Sync>, seed: u64) -> Self {
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let samples = (0..4).map(|_| linalg::random_complex(&mut rng, n, n)).collect();
        MatrixEndoModel { n, lambda, samples, subalgebra: None }
    }

    pub fn inner(u: &CMat, seed: u64) -> Self {
        let u2 = u.clone();
        MatrixEndoModel::new(u.nrows(), Box::new(move |x: &CMat| &u2 * x * u2.adjoint()), seed)
    }
}

impl EndoModel for MatrixEndoModel {
    type Op = CMat;
    fn one(&self) -> CMat {
        linalg::eye(self.n)
    }
    fn mul(&self, a: &CMat, b: &CMat) -> CMat {
        a * b
    }
    fn adjoint(&self, a: &CMat) -> CMat {
        a.adjoint()
    }
    fn lambda(&self, a: &CMat) -> CMat {
        (self.lambda)(a)
    }
    fn scale(&self, a: &CMat, z: Complex64) -> CMat {
        a * z
    }
    fn dist(&self, a: &CMat, b: &CMat) -> f64 {
        linalg::op_norm(&(a - b))
    }
    fn scalar_part(&self, a: &CMat) -> (Complex64, f64) {
        let z = linalg::trace(a) / self.n as f64;
        (z, linalg::op_norm(&(a - linalg::eye(self.n) * z)))
    }
    fn min_eigenvalue(&self, a: &CMat) -> f64 {
        Spectral::new(a).min()
    }
    fn samples(&self) -> Vec<CMat> {
        self.samples.clone()
    }
    fn membership_residual(&self, a: &CMat) -> Option<f64> {
        let basis = self.subalgebra.as_ref()?;
        // least-squares projection onto the span
        let cols: Vec<CVec> = basis.iter().map(linalg::vec_row_major).collect();
        let m = CMat::from_columns(&cols);
        let v = linalg::vec_row_major(a);
        let gram = m.adjoint() * &m;
        let coef = gram.pseudo_inverse(1e-12).ok()? * (m.adjoint() * &v);
        Some((m * coef - v).norm())
    }
}

/// Operator on `⊕_ℓ V^{⊗ℓ}` of fixed degree `k`, stored level by level as
/// maps `V^{⊗ℓ} → V^{⊗(ℓ+k)}` on a finite window of levels.
#[derive(Clone, Debug)]
pub struct TensorOp {
    pub degree: i64,
    pub levels: BTreeMap<usize, CMat>,
}

/// Shift model of a canonical endomorphism: `λ(x) = 1_{V⊗V} ⊗ x`,
/// `T = R̄` inserted in front, `S = ρ(R)` inserted after the first leg, and
/// `ρ(𝔄) = 1_V ⊗ ·` as the designated subalgebra.
pub struct TensorShiftModel {
    pub n: usize,
    pub lo: usize,
    pub hi: usize,
    seed: u64,
}

impl TensorShiftModel {
    pub fn new(n: usize, lo: usize, hi: usize, seed: u64) -> Self {
        TensorShiftModel { n, lo: lo.max(2), hi, seed }
    }

    fn pow(&self, l: usize) -> usize {
        self.n.pow(l as u32)
    }

    /// `ξ ↦ r̄ ⊗ ξ`.
    pub fn insert_front(&self, v: &CVec) -> TensorOp {
        let col = CMat::from_column_slice(v.len(), 1, v.as_slice());
        let levels = (self.lo..=self.hi).map(|l| (l, linalg::kron(&col, &linalg::eye(self.pow(l))))).collect();
        TensorOp { degree: 2, levels }
    }

    /// `v₁ ⊗ ξ ↦ v₁ ⊗ r ⊗ ξ`.
    pub fn insert_second(&self, v: &CVec) -> TensorOp {
        let col = CMat::from_column_slice(v.len(), 1, v.as_slice());
        let levels = (self.lo..=self.hi)
            .map(|l| (l, linalg::kron(&linalg::eye(self.n), &linalg::kron(&col, &linalg::eye(self.pow(l - 1))))))
            .collect();
        TensorOp { degree: 2, levels }
    }

    /// `a ⊗ 1` acting on the first legs.
    pub fn local(&self, a: &CMat) -> TensorOp {
        let legs = (a.nrows() as f64).log(self.n as f64).round() as usize;
        let levels = (self.lo.max(legs)..=self.hi).map(|l| (l, linalg::kron(a, &linalg::eye(self.pow(l - legs))))).collect();
        TensorOp { degree: 0, levels }
    }

    fn out_dim(&self, op: &TensorOp, l: usize) -> usize {
        self.pow((l as i64 + op.degree) as usize)
    }
}

impl EndoModel for TensorShiftModel {
    type Op = TensorOp;
    fn one(&self) -> TensorOp {
        TensorOp { degree: 0, levels: (self.lo..=self.hi + 2).map(|l| (l, linalg::eye(self.pow(l)))).collect() }
    }
    fn mul(&self, a: &TensorOp, b: &TensorOp) -> TensorOp {
        let mut levels = BTreeMap::new();
        for (&l, mb) in &b.levels {
            let mid = (l as i64 + b.degree) as usize;
            if let Some(ma) = a.levels.get(&mid) {
                levels.insert(l, ma * mb);
            }
        }
        TensorOp { degree: a.degree + b.degree, levels }
    }
    fn adjoint(&self, a: &TensorOp) -> TensorOp {
        let levels = a.levels.iter().map(|(&l, m)| (((l as i64) + a.degree) as usize, m.adjoint())).collect();
        TensorOp { degree: -a.degree, levels }
    }
    fn lambda(&self, a: &TensorOp) -> TensorOp {
        let pre = linalg::eye(self.n * self.n);
        let levels = a.levels.iter().map(|(&l, m)| (l + 2, linalg::kron(&pre, m))).collect();
        TensorOp { degree: a.degree, levels }
    }
    fn scale(&self, a: &TensorOp, z: Complex64) -> TensorOp {
        TensorOp { degree: a.degree, levels: a.levels.iter().map(|(&l, m)| (l, m * z)).collect() }
    }
    fn dist(&self, a: &TensorOp, b: &TensorOp) -> f64 {
        if a.degree != b.degree {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        let mut common = 0;
        for (l, ma) in &a.levels {
            if let Some(mb) = b.levels.get(l) {
                common += 1;
                worst = worst.max(linalg::op_norm(&(ma - mb)));
            }
        }
        if common == 0 {
            f64::INFINITY
        } else {
            worst
        }
    }
    fn scalar_part(&self, a: &TensorOp) -> (Complex64, f64) {
        if a.degree != 0 || a.levels.is_empty() {
            return (ZERO, f64::INFINITY);
        }
        let (l0, m0) = a.levels.iter().next().unwrap();
        let z = linalg::trace(m0) / self.pow(*l0) as f64;
        let res = a.levels.iter().map(|(&l, m)| linalg::op_norm(&(m - linalg::eye(self.pow(l)) * z))).fold(0.0, f64::max);
        (z, res)
    }
    fn min_eigenvalue(&self, a: &TensorOp) -> f64 {
        a.levels.values().map(|m| Spectral::new(m).min()).fold(f64::INFINITY, f64::min)
    }
    fn samples(&self) -> Vec<TensorOp> {
        let mut rng = rand::rngs::StdRng::seed_from_u64(self.seed);
        let m = self.n * self.n;
        (0..3).map(|_| self.local(&linalg::random_complex(&mut rng, m, m))).collect()
    }
    fn membership_residual(&self, a: &TensorOp) -> Option<f64> {
        // x ∈ 1_V ⊗ (·) iff x equals 1 ⊗ (normalized partial trace over leg one)
        let n = self.n;
        let mut worst: f64 = 0.0;
        for (&l, m) in &a.levels {
            let (rows, cols) = (self.out_dim(a, l) / n, self.pow(l) / n);
            let mut y = CMat::zeros(rows, cols);
            for k in 0..n {
                y += m.view((k * rows, k * cols), (rows, cols));
            }
            y /= c(n as f64, 0.0);
            worst = worst.max(linalg::op_norm(&(m - linalg::kron(&linalg::eye(n), &y))));
        }
        Some(worst)
    }
}

impl TensorShiftModel {
    /// `(T, S) = (R̄, ρ(R))` from a conjugate solution.
    pub fn from_solution(sol: &ConjugateSolution, hi: usize, seed: u64) -> (TensorShiftModel, TensorOp, TensorOp) {
        let model = TensorShiftModel::new(sol.dim(), 2, hi, seed);
        let t = model.insert_front(&sol.rbar);
        let s = model.insert_second(&sol.r);
        (model, t, s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s3_classes_and_characters() {
        let g = Group::symmetric(3);
        assert_eq!(g.order(), 6);
        assert_eq!(g.conjugacy_classes().len(), 3);
        let ct = character_table(&g).unwrap();
        let mut dims = ct.dims();
        dims.sort();
        assert_eq!(dims, vec![1, 1, 2]);
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(Group::new(vec![vec![0, 1], vec![0, 1]]).is_err());
        assert!(Group::new(vec![vec![0, 5], vec![1, 0]]).is_err());
    }

    #[test]
    fn quaternion_group_order() {
        let g = Group::quaternion();
        assert_eq!(g.order(), 8);
        assert_eq!(g.conjugacy_classes().len(), 5);
        assert!(quaternion_rep().is_irreducible());
    }

    #[test]
    fn fibonacci_dimension() {
        let d = pf_dimension(&FusionRing::fibonacci(), 1).unwrap();
        assert!((d - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn broken_ring_rejected() {
        let r = FusionRing::from_entries(vec!["1".into(), "x".into()], vec![0, 1], &[(0, 0, 0, 1), (0, 1, 1, 1), (1, 0, 1, 1), (1, 1, 1, 1)]);
        assert!(r.is_err());
    }
}
