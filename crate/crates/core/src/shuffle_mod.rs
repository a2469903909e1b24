//! The shuffle algebra of a Cartan datum, wheel conditions, and the
//! finite-dimensional modules cut out by residue ideals.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact_ring::laurent::color_offsets;
use crate::exact_ring::linalg::Echelon;
use crate::exact_ring::sym::{div_linear, sym_over_vandermonde, vandermonde};
use crate::exact_ring::{LaurentPoly, Scalar};
use crate::par;
use crate::quiver_cells::grassmannian_euler;
use crate::root_data::{graded_potential, quiver_from_x, zeta_ratio, CartanDatum};
use crate::theta_ideals::{rescale_to_graded, theta_psi_x, theta_x_graded, Window};

/// An l-weight `psi_i(z) = prod_s (1 - q^s/z)^{l_{i,s}} / (1 - q^s/z)^{m_{i,s}}`
/// up to constants, stored as multiplicities keyed by `(vertex, s)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EllWeight {
    pub l: BTreeMap<(usize, i64), u32>,
    pub m: BTreeMap<(usize, i64), u32>,
}

impl EllWeight {
    pub fn new(l: BTreeMap<(usize, i64), u32>, m: BTreeMap<(usize, i64), u32>) -> Self {
        let strip = |mut x: BTreeMap<(usize, i64), u32>| {
            x.retain(|_, v| *v > 0);
            x
        };
        EllWeight { l: strip(l), m: strip(m) }
    }

    /// The prefundamental weight `1/(1 - q^s/z)` at vertex `i`.
    pub fn prefundamental(i: usize, s: i64) -> Self {
        EllWeight::new(BTreeMap::new(), BTreeMap::from([((i, s), 1)]))
    }

    /// The fundamental weight at vertex `i`: zero at `q^{s - d_ii}` and a
    /// pole at `q^s`.
    pub fn fundamental(datum: &CartanDatum, i: usize, s: i64) -> Self {
        let l = BTreeMap::from([((i, s - datum.d(i, i)), 1)]);
        EllWeight::new(l, BTreeMap::from([((i, s), 1)]))
    }

    pub fn l_at(&self, i: usize, s: i64) -> u32 {
        self.l.get(&(i, s)).copied().unwrap_or(0)
    }

    pub fn m_at(&self, i: usize, s: i64) -> u32 {
        self.m.get(&(i, s)).copied().unwrap_or(0)
    }

    /// Order of the pole of `psi_i` at `q^s` (negative for a zero).
    pub fn pole_order(&self, i: usize, s: i64) -> i64 {
        self.m_at(i, s) as i64 - self.l_at(i, s) as i64
    }

    /// The denominator part `1/psi^den` keeps only the poles.
    pub fn denominator(&self) -> EllWeight {
        EllWeight { l: BTreeMap::new(), m: self.m.clone() }
    }

    pub fn is_polynomial_denominator(&self) -> bool {
        self.l.is_empty()
    }

    /// Parses `{"l": [[vertex, s, mult], ...], "m": [...]}`; vertices may be
    /// names or indices.
    pub fn from_json(datum: &CartanDatum, v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::Parse("l-weight must be an object".into()))?;
        for k in obj.keys() {
            if k != "l" && k != "m" {
                return Err(Error::Parse(format!("unknown l-weight field {k:?}")));
            }
        }
        let read = |key: &str| -> Result<BTreeMap<(usize, i64), u32>> {
            let mut out = BTreeMap::new();
            let Some(list) = obj.get(key) else { return Ok(out) };
            let list = list.as_array().ok_or_else(|| Error::Parse(format!("{key} must be a list")))?;
            for item in list {
                let t = item
                    .as_array()
                    .filter(|t| t.len() == 3)
                    .ok_or_else(|| Error::Parse(format!("{key} entries are [vertex, s, mult]")))?;
                let i = datum.resolve_vertex(&t[0])?;
                let s = t[1].as_i64().ok_or_else(|| Error::Parse("s must be an integer".into()))?;
                let k = t[2]
                    .as_u64()
                    .and_then(|k| u32::try_from(k).ok())
                    .ok_or_else(|| Error::Parse("multiplicity must be a nonnegative integer".into()))?;
                *out.entry((i, s)).or_insert(0) += k;
            }
            Ok(out)
        };
        Ok(EllWeight::new(read("l")?, read("m")?))
    }

    pub fn to_json(&self, datum: &CartanDatum) -> Value {
        let list = |x: &BTreeMap<(usize, i64), u32>| -> Vec<Value> {
            x.iter().map(|(&(i, s), &k)| json!([datum.names()[i], s, k])).collect()
        };
        json!({"l": list(&self.l), "m": list(&self.m)})
    }
}

/// A point `x` with coordinates `q^s`, listed per vertex in increasing order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct XPoint {
    pub entries: Vec<Vec<i64>>,
}

impl XPoint {
    pub fn new(mut entries: Vec<Vec<i64>>) -> Self {
        for e in &mut entries {
            e.sort_unstable();
        }
        XPoint { entries }
    }

    pub fn dims(&self) -> Vec<usize> {
        self.entries.iter().map(Vec::len).collect()
    }

    pub fn total(&self) -> usize {
        self.entries.iter().map(Vec::len).sum()
    }

    /// `(vertex, s)` of each ambient variable, color-major.
    pub fn labels(&self) -> Vec<(usize, i64)> {
        self.entries.iter().enumerate().flat_map(|(i, e)| e.iter().map(move |&s| (i, s))).collect()
    }

    /// Parses `{"vertex": [s, ...]}`.
    pub fn from_json(datum: &CartanDatum, v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::Parse("x must be an object".into()))?;
        let mut entries = vec![Vec::new(); datum.rank()];
        for (k, list) in obj {
            let i = datum.resolve_vertex(&Value::String(k.clone()))?;
            let list = list.as_array().ok_or_else(|| Error::Parse(format!("x[{k}] must be a list")))?;
            for s in list {
                entries[i].push(s.as_i64().ok_or_else(|| Error::Parse("x entries are integers".into()))?);
            }
        }
        Ok(XPoint::new(entries))
    }

    pub fn to_json(&self, datum: &CartanDatum) -> Value {
        let mut m = serde_json::Map::new();
        for (i, e) in self.entries.iter().enumerate() {
            if !e.is_empty() {
                m.insert(datum.names()[i].clone(), json!(e));
            }
        }
        Value::Object(m)
    }
}

fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}

/// Colors of the flat variables, color-major.
fn colors_of(dims: &[usize]) -> Vec<usize> {
    dims.iter().enumerate().flat_map(|(i, &d)| std::iter::repeat_n(i, d)).collect()
}

/// `prod_{pairs} zeta_{c(w) c(u)}(z_w / z_u)` with the same-color
/// denominators dropped, for pairs `(u, w)` of flat variables with `u`
/// before `w` in every same-color pair.
fn zeta_numerator(datum: &CartanDatum, dims: &[usize], pairs: &[(usize, usize)]) -> LaurentPoly {
    let colors = colors_of(dims);
    let mut p = LaurentPoly::one(dims);
    for &(u, w) in pairs {
        let (num, _) = zeta_ratio(datum, colors[w], colors[u], dims, w, u);
        p = p.mul(&num);
    }
    p
}

/// The shuffle product `F * G`: `1/(prod n_i! n'_i!)` times the sum over
/// color-preserving permutations of
/// `F(first block) G(second block) prod zeta_{c(w) c(u)}(z_w / z_u)`.
pub fn shuffle_product(datum: &CartanDatum, f: &LaurentPoly, g: &LaurentPoly) -> Result<LaurentPoly> {
    let (n1, n2) = (f.dims().to_vec(), g.dims().to_vec());
    if n1.len() != datum.rank() || n2.len() != datum.rank() {
        return Err(Error::ShapeMismatch("factors must have one block per vertex".into()));
    }
    if !f.is_color_symmetric() || !g.is_color_symmetric() {
        return Err(Error::NonSymmetric);
    }
    let dims: Vec<usize> = n1.iter().zip(&n2).map(|(a, b)| a + b).collect();
    let offs = color_offsets(&dims);
    // F occupies the first n1_i slots of each color, G the remaining ones
    let mut map_f = Vec::new();
    let mut map_g = Vec::new();
    let mut first = Vec::new();
    let mut second = Vec::new();
    for i in 0..dims.len() {
        for k in 0..n1[i] {
            map_f.push(offs[i] + k);
            first.push(offs[i] + k);
        }
        for k in 0..n2[i] {
            map_g.push(offs[i] + n1[i] + k);
            second.push(offs[i] + n1[i] + k);
        }
    }
    let mut pairs = Vec::new();
    for &u in &first {
        for &w in &second {
            pairs.push((u, w));
        }
    }
    // the same-color cross denominators times the within-block Vandermondes
    // are the full Vandermonde, so Sym[N V_in / Delta] = Alt[N V_in] / Delta
    let v_in = vandermonde(&n1).embed(&dims, &map_f).mul(&vandermonde(&n2).embed(&dims, &map_g));
    let numer =
        f.embed(&dims, &map_f).mul(&g.embed(&dims, &map_g)).mul(&zeta_numerator(datum, &dims, &pairs)).mul(&v_in);
    let out = sym_over_vandermonde(&numer)?;
    let norm: i64 = n1.iter().chain(&n2).map(|&k| factorial(k)).product();
    Ok(out.scale(&Scalar::ratio(1, norm)))
}

/// `Sym[z_1^{d_1} ... z_n^{d_n} prod_{a<b} zeta_{i_b i_a}(z_b / z_a)]`
/// (sum over color-preserving permutations), with position `a` placed on
/// the next free variable of color `i_a`.
pub fn generator(datum: &CartanDatum, ordering: &[usize], d: &[i32]) -> Result<LaurentPoly> {
    if ordering.len() != d.len() {
        return Err(Error::ShapeMismatch("ordering and exponents differ in length".into()));
    }
    if let Some(&i) = ordering.iter().find(|&&i| i >= datum.rank()) {
        return Err(Error::InvalidDatum(format!("vertex {i} out of range")));
    }
    let mut dims = vec![0usize; datum.rank()];
    let vars: Vec<usize> = {
        let mut seen = vec![0usize; datum.rank()];
        for &i in ordering {
            dims[i] += 1;
        }
        let offs = color_offsets(&dims);
        ordering
            .iter()
            .map(|&i| {
                seen[i] += 1;
                offs[i] + seen[i] - 1
            })
            .collect()
    };
    let nvars = vars.len();
    let mut e = vec![0i32; nvars];
    for (a, &v) in vars.iter().enumerate() {
        e[v] = d[a];
    }
    let mut pairs = Vec::new();
    for a in 0..nvars {
        for b in a + 1..nvars {
            pairs.push((vars[a], vars[b]));
        }
    }
    let numer = zeta_numerator(datum, &dims, &pairs).mul_monomial(&e, &Scalar::one());
    sym_over_vandermonde(&numer)
}

/// Outcome of a wheel test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WheelOutcome {
    Pass,
    Fail,
    NotApplicable,
}

fn var(dims: &[usize], i: usize, k: usize) -> usize {
    color_offsets(dims)[i] + k
}

/// The finite-type wheel condition for `i != j`: `F` vanishes under
/// `z_{i,k+1} -> z_{j1} q^{d_ij + k d_ii}` for `k = 0..-c_ij`.
pub fn wheel_check_finite(f: &LaurentPoly, datum: &CartanDatum, i: usize, j: usize) -> Result<WheelOutcome> {
    if i == j || i >= datum.rank() || j >= datum.rank() {
        return Err(Error::InvalidDatum(format!("wheel condition needs distinct vertices, got {i}, {j}")));
    }
    let dims = f.dims();
    let need = (1 - datum.c(i, j)) as usize;
    if dims[i] < need || dims[j] < 1 {
        return Ok(WheelOutcome::NotApplicable);
    }
    let zj = var(dims, j, 0);
    let mut g = f.clone();
    for k in 0..need {
        let r = datum.d(i, j) + k as i64 * datum.d(i, i);
        g = g.substitute_var(var(dims, i, k), zj, r, 1);
    }
    Ok(if g.is_zero() { WheelOutcome::Pass } else { WheelOutcome::Fail })
}

/// Parameters `(s, t, s', t')` of the simply-laced wheel condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WheelString {
    pub s: i64,
    pub t: i64,
    pub s2: i64,
    pub t2: i64,
}

/// The simply-laced wheel condition: after `z_{i,k+1} = x q^{s+2k}` and
/// `z_{j,k+1} = y q^{s'+2k}`, `(x - y)^{(t - s' + d_ij)/2 + 1}` divides `F`.
pub fn wheel_check_simply_laced(
    f: &LaurentPoly,
    datum: &CartanDatum,
    i: usize,
    j: usize,
    w: WheelString,
) -> Result<WheelOutcome> {
    if i == j || i >= datum.rank() || j >= datum.rank() {
        return Err(Error::InvalidDatum(format!("wheel condition needs distinct vertices, got {i}, {j}")));
    }
    let dij = datum.d(i, j);
    let even = |v: i64| v.rem_euclid(2) == 0;
    if w.t < w.s || w.t2 < w.s2 || !even(w.t - w.s) || !even(w.t2 - w.s2) {
        return Err(Error::Parity(format!(
            "t - s = {} and t' - s' = {} must be even and nonnegative",
            w.t - w.s,
            w.t2 - w.s2
        )));
    }
    if !even(w.s - w.t2 - dij) || !even(w.s2 - w.t - dij) {
        return Err(Error::Parity(format!("s - t' and s' - t must be congruent to d_ij = {dij} mod 2")));
    }
    let power = (w.t - w.s2 + dij) / 2 + 1;
    let dims = f.dims();
    let (ki, kj) = (((w.t - w.s) / 2 + 1) as usize, ((w.t2 - w.s2) / 2 + 1) as usize);
    if dims[i] < ki || dims[j] < kj {
        return Ok(WheelOutcome::NotApplicable);
    }
    if power <= 0 {
        return Ok(WheelOutcome::Pass);
    }
    let (x, y) = (var(dims, i, 0), var(dims, j, 0));
    let mut g = f.clone();
    for k in 1..ki {
        g = g.substitute_var(var(dims, i, k), x, 2 * k as i64, 1);
    }
    for k in 1..kj {
        g = g.substitute_var(var(dims, j, k), y, 2 * k as i64, 1);
    }
    let mut shift = vec![0i64; g.nvars()];
    shift[x] = w.s;
    shift[y] = w.s2;
    g = g.rescale(&shift);
    for _ in 0..power {
        match div_linear(&g, x, y, 0) {
            Some(h) => g = h,
            None => return Ok(WheelOutcome::Fail),
        }
    }
    Ok(WheelOutcome::Pass)
}

/// Result of a module dimension computation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModuleDimension {
    pub dim: usize,
    /// Dimension of the ambient quotient.
    pub corank: usize,
    pub generators: usize,
    pub certified: bool,
}

fn trivial_dimension() -> ModuleDimension {
    ModuleDimension { dim: 1, corank: 1, generators: 1, certified: true }
}

/// All `d` with `0 <= d_a < bounds[a]`.
fn exponent_box(bounds: &[usize]) -> Vec<Vec<i32>> {
    let mut out = vec![vec![]];
    for &b in bounds {
        out = out
            .into_iter()
            .flat_map(|d| {
                (0..b as i32).map(move |k| {
                    let mut d = d.clone();
                    d.push(k);
                    d
                })
            })
            .collect();
    }
    out
}

/// Rank of the images of `Sym[z^d Z]` (all orderings, `d` in the
/// certified box) under `image`.
fn generator_rank(
    datum: &CartanDatum,
    dims: &[usize],
    bounds: &[usize],
    width: usize,
    image: &(dyn Fn(&LaurentPoly) -> Result<Vec<Scalar>> + Sync),
) -> Result<(usize, usize)> {
    let mut specs: Vec<(Vec<usize>, Vec<i32>)> = Vec::new();
    for o in crate::quiver_cells::orderings(dims) {
        let box_bounds: Vec<usize> = o.iter().map(|&i| bounds[i]).collect();
        for d in exponent_box(&box_bounds) {
            specs.push((o.clone(), d));
        }
    }
    // low total degree first, so the early exit triggers sooner
    specs.sort_by_key(|(_, d)| d.iter().map(|&x| x as i64).sum::<i64>());
    let mut ech = Echelon::new(width);
    let mut used = 0;
    for chunk in specs.chunks(64) {
        if ech.is_full() {
            break;
        }
        let rows = par::try_map(chunk, |(o, d)| image(&generator(datum, o, d)?))?;
        for r in rows {
            used += 1;
            ech.insert(&r);
            if ech.is_full() {
                break;
            }
        }
    }
    Ok((ech.rank(), used))
}

/// `dim S_n / (S_n cap Theta(psi)_x)`: the rank of the generator images in
/// `V_n / Theta(psi)_x`.
pub fn module_dimension(datum: &CartanDatum, x: &XPoint, psi: &EllWeight, window: Window) -> Result<ModuleDimension> {
    if x.total() == 0 {
        return Ok(trivial_dimension());
    }
    let space = theta_psi_x(datum, x, psi, window)?;
    if space.rank == 0 {
        return Ok(ModuleDimension { dim: 0, corank: 0, generators: 0, certified: space.certified });
    }
    let bounds = space.generator_bounds()?;
    let (dim, used) = generator_rank(datum, &x.dims(), &bounds, space.rank, &|g| space.image(g))?;
    Ok(ModuleDimension { dim, corank: space.rank, generators: used, certified: space.certified })
}

/// `Delta^gr = prod_v (1 - 1/z_v)^{l_{i_v, s_v}}` on `V_x`.
pub fn delta_graded(x: &XPoint, psi: &EllWeight) -> LaurentPoly {
    let dims = x.dims();
    let mut p = LaurentPoly::one(&dims);
    for (v, (i, s)) in x.labels().into_iter().enumerate() {
        let l = psi.l_at(i, s);
        if l > 0 {
            let mut e = vec![0i32; p.nvars()];
            e[v] = -1;
            let f = LaurentPoly::one(&dims).sub(&LaurentPoly::monomial(&dims, e, Scalar::one()));
            p = p.mul(&f.pow(l));
        }
    }
    p
}

/// The same dimension through the twist: the rank of
/// `Delta^gr * (generators rescaled to V_x)` in `V_x / Theta^{m}_x`, with
/// `m` the pole orders of `psi^den` alone.
pub fn module_dimension_twisted(
    datum: &CartanDatum,
    x: &XPoint,
    psi: &EllWeight,
    window: Window,
) -> Result<ModuleDimension> {
    if x.total() == 0 {
        return Ok(trivial_dimension());
    }
    let den = psi.denominator();
    let space = theta_x_graded(datum, x, &|i, s| den.pole_order(i, s), window)?;
    if space.rank == 0 {
        return Ok(ModuleDimension { dim: 0, corank: 0, generators: 0, certified: space.certified });
    }
    let delta = delta_graded(x, psi);
    let bounds = space.generator_bounds()?;
    let (dim, used) =
        generator_rank(datum, &x.dims(), &bounds, space.rank, &|g| space.image(&delta.mul(&rescale_to_graded(g, x)?)))?;
    Ok(ModuleDimension { dim, corank: space.rank, generators: used, certified: space.certified })
}

/// One `(n, x)` coefficient of the character.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CharacterEntry {
    pub n: Vec<usize>,
    pub x: XPoint,
    pub dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub euler_cmp: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub twisted: Option<usize>,
}

/// Coefficients of `prod A^{-1}_{i, x_ia}` in the character of
/// `L^{!=0}(psi)` over a finite window of `(n, x)`; zero entries are
/// omitted except `(0, empty)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CharacterTable {
    pub head: EllWeightLabel,
    pub entries: Vec<CharacterEntry>,
    pub max_total: usize,
    pub s_range: (i64, i64),
    pub certified: bool,
}

/// The head symbol `[psi]` as its zero and pole data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EllWeightLabel {
    pub l: Vec<(usize, i64, u32)>,
    pub m: Vec<(usize, i64, u32)>,
}

impl From<&EllWeight> for EllWeightLabel {
    fn from(p: &EllWeight) -> Self {
        let f = |x: &BTreeMap<(usize, i64), u32>| x.iter().map(|(&(i, s), &k)| (i, s, k)).collect();
        EllWeightLabel { l: f(&p.l), m: f(&p.m) }
    }
}

impl serde::Serialize for XPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.entries.serialize(s)
    }
}

/// All points with `sum n <= max_total` and entries in `lo..=hi`.
pub fn points_in_window(rank: usize, max_total: usize, lo: i64, hi: i64) -> Vec<XPoint> {
    // multisets of labels (i, s), grouped by color
    let labels: Vec<(usize, i64)> = (0..rank).flat_map(|i| (lo..=hi).map(move |s| (i, s))).collect();
    let mut out = Vec::new();
    fn rec(
        labels: &[(usize, i64)],
        start: usize,
        left: usize,
        cur: &mut Vec<(usize, i64)>,
        rank: usize,
        out: &mut Vec<XPoint>,
    ) {
        let mut e = vec![Vec::new(); rank];
        for &(i, s) in cur.iter() {
            e[i].push(s);
        }
        out.push(XPoint::new(e));
        if left == 0 {
            return;
        }
        for k in start..labels.len() {
            cur.push(labels[k]);
            rec(labels, k, left - 1, cur, rank, out);
            cur.pop();
        }
    }
    rec(&labels, 0, max_total, &mut Vec::new(), rank, &mut out);
    out.sort();
    out
}

/// Options for [`assemble_character`].
#[derive(Clone, Copy, Debug)]
pub struct CharacterOptions {
    pub max_total: usize,
    /// Padding of the `s` range around the support of `psi`.
    pub pad: i64,
    pub window: Window,
    /// Also compute the twisted route and fail on disagreement.
    pub check_routes: bool,
}

/// Whether the Euler characteristic comparison applies at `x`: the graded
/// potential vanishes and `psi` has no zeros on the support of `x`.
pub fn euler_comparable(datum: &CartanDatum, x: &XPoint, psi: &EllWeight) -> bool {
    let gq = quiver_from_x(datum, x, psi);
    graded_potential(&gq, datum).is_zero() && x.labels().iter().all(|&(i, s)| psi.l_at(i, s) == 0)
}

/// Euler characteristic of the stable framed moduli of the graded quiver
/// attached to `x`.
pub fn euler_at(datum: &CartanDatum, x: &XPoint, psi: &EllWeight) -> usize {
    let gq = quiver_from_x(datum, x, psi);
    grassmannian_euler(&gq.quiver, &gq.dims)
}

pub fn assemble_character(datum: &CartanDatum, psi: &EllWeight, opts: CharacterOptions) -> Result<CharacterTable> {
    let support: Vec<i64> = psi.l.keys().chain(psi.m.keys()).map(|k| k.1).collect();
    let (lo, hi) = match (support.iter().min(), support.iter().max()) {
        (Some(&a), Some(&b)) => (a - opts.pad, b + opts.pad),
        _ => (0, 0),
    };
    let points = if support.is_empty() {
        vec![XPoint::new(vec![Vec::new(); datum.rank()])]
    } else {
        points_in_window(datum.rank(), opts.max_total, lo, hi)
    };
    let results = par::try_map(&points, |x| -> Result<Option<CharacterEntry>> {
        let md = module_dimension(datum, x, psi, opts.window)?;
        let twisted = if opts.check_routes {
            let tw = module_dimension_twisted(datum, x, psi, opts.window)?;
            if tw.dim != md.dim {
                return Err(Error::CrossCheck(format!(
                    "route mismatch at x = {:?}: {} vs {}",
                    x.entries, md.dim, tw.dim
                )));
            }
            Some(tw.dim)
        } else {
            None
        };
        let euler_cmp = euler_comparable(datum, x, psi).then(|| euler_at(datum, x, psi));
        if md.dim == 0 && x.total() > 0 {
            return Ok(None);
        }
        Ok(Some(CharacterEntry { n: x.dims(), x: x.clone(), dim: md.dim, euler_cmp, twisted }))
    })?;
    Ok(CharacterTable {
        head: psi.into(),
        entries: results.into_iter().flatten().collect(),
        max_total: opts.max_total,
        s_range: (lo, hi),
        certified: !matches!(opts.window, Window::Unsafe(_)),
    })
}
