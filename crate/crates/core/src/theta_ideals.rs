//! Residue functionals, the ideals they cut out, and quotient dimensions by
//! exact rank computation.
//!
//! Every ideal here is the common kernel of functionals
//! `F -> Res((z - c)^i F K)` for a finite list of frames (an ordering of
//! the variables with residue centers and a kernel `K`). A frame only sees
//! the Taylor coefficients of `F` on a finite down-set `J`, so `i` ranges
//! over `J` and the functional matrix is finite.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_ring::laurent::color_offsets;
use crate::exact_ring::linalg::{nullspace, Echelon};
use crate::exact_ring::sym::sym_over_vandermonde;
use crate::exact_ring::{Factor, LaurentPoly, ResidueKernel, Scalar};
use crate::par;
use crate::quiver_cells::{orderings, AcceptableCollection, PathOrder};
use crate::root_data::{zeta_ratio, CartanDatum, Quiver};
use crate::shuffle_mod::{EllWeight, XPoint};

/// One ordering `i_1, ..., i_n` with residue centers `q^{s_a}` and the
/// kernel of its functionals.
#[derive(Clone, Debug)]
pub struct OrderedFrame {
    /// Color of each position.
    pub ordering: Vec<usize>,
    /// Center exponent `s_a` of each position.
    pub centers: Vec<i64>,
    /// Ambient variable at each position.
    pub vars: Vec<usize>,
    /// Kernel factors over ambient variables; positive exponents divide.
    pub factors: Vec<(Factor, i32)>,
    pub numer: Option<LaurentPoly>,
    kernel: ResidueKernel,
    support: Vec<Vec<usize>>,
}

impl OrderedFrame {
    pub fn new(
        ordering: Vec<usize>,
        centers: Vec<i64>,
        vars: Vec<usize>,
        nvars: usize,
        factors: Vec<(Factor, i32)>,
        numer: Option<LaurentPoly>,
    ) -> Result<Self> {
        if ordering.len() != centers.len() || ordering.len() != vars.len() {
            return Err(Error::ShapeMismatch("frame data of different lengths".into()));
        }
        let cs: Vec<(usize, i64)> = vars.iter().copied().zip(centers.iter().copied()).collect();
        let kernel = ResidueKernel::new(nvars, &factors, numer.as_ref(), &cs)?;
        let support = kernel.support();
        Ok(OrderedFrame { ordering, centers, vars, factors, numer, kernel, support })
    }

    pub fn kernel(&self) -> &ResidueKernel {
        &self.kernel
    }

    /// The Taylor multi-indices (in positions) the functionals depend on.
    pub fn support(&self) -> &[Vec<usize>] {
        &self.support
    }

    /// `Res((z - c)^offset F K)`.
    pub fn apply(&self, offset: &[usize], f: &LaurentPoly) -> Result<Scalar> {
        self.kernel.residue_at(f, offset)
    }

    /// Per position, the power of `(z_a - c_a)` modulo which the
    /// functionals factor, after adding the given extra factors.
    fn pole_orders_with(&self, extra: &[(Factor, i32)]) -> Result<Option<Vec<usize>>> {
        let mut f = self.factors.clone();
        f.extend_from_slice(extra);
        let cs: Vec<(usize, i64)> = self.vars.iter().copied().zip(self.centers.iter().copied()).collect();
        Ok(ResidueKernel::new(self.kernel.nvars(), &f, None, &cs)?.pole_orders())
    }
}

/// How the column space is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Window {
    /// Certified columns: shifted Taylor types when every symmetry class
    /// has a single center, the certified monomial window otherwise.
    #[default]
    Auto,
    /// Monomial symmetric functions with exponents below the bound, which
    /// must be at least the certified one.
    Monomial(usize),
    /// Like `Monomial` but accepted below the certified bound.
    Unsafe(usize),
}

#[derive(Clone, Debug)]
enum Columns {
    /// Orbit sums of `prod (z_v - c_v)^{k_v}`, stored as the ambient
    /// multi-indices in each orbit.
    Shifted {
        centers: Vec<i64>,
        orbits: Vec<Vec<Vec<usize>>>,
    },
    Monomial {
        polys: Vec<LaurentPoly>,
    },
}

/// The functionals of a family of frames, evaluated on a basis of the
/// (partially) symmetric polynomials modulo their common kernel.
#[derive(Clone, Debug)]
pub struct FunctionalSpace {
    pub dims: Vec<usize>,
    /// Groups of ambient variables the input is symmetric in.
    pub classes: Vec<Vec<usize>>,
    pub frames: Vec<OrderedFrame>,
    /// Ambient rescaling exponents applied to inputs before evaluation in
    /// graded coordinates (all zero otherwise).
    pub rescale: Vec<i64>,
    columns: Columns,
    /// Independent functionals `(frame, offset)` spanning the row space.
    pub basis_rows: Vec<(usize, Vec<usize>)>,
    pub rank: usize,
    pub ncols: usize,
    /// Largest column exponent bound used.
    pub window: usize,
    /// Certified monomial window.
    pub required: usize,
    pub certified: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct SpaceSummary {
    pub corank: usize,
    pub rank: usize,
    pub columns: usize,
    pub window: usize,
    pub required_window: usize,
    pub certified: bool,
    pub frames: usize,
}

impl FunctionalSpace {
    /// `dim V / Theta`: the rank of the functional matrix.
    pub fn corank(&self) -> usize {
        self.rank
    }

    pub fn summary(&self) -> SpaceSummary {
        SpaceSummary {
            corank: self.corank(),
            rank: self.rank,
            columns: self.ncols,
            window: self.window,
            required_window: self.required,
            certified: self.certified,
            frames: self.frames.len(),
        }
    }

    /// Evaluates the `k`-th basis functional.
    pub fn apply_basis(&self, k: usize, f: &LaurentPoly) -> Result<Scalar> {
        let (fi, off) = &self.basis_rows[k];
        self.frames[*fi].apply(off, f)
    }

    /// Coordinates of `f` in the quotient, against the basis functionals.
    pub fn image(&self, f: &LaurentPoly) -> Result<Vec<Scalar>> {
        (0..self.basis_rows.len()).map(|k| self.apply_basis(k, f)).collect()
    }

    /// Exponent bound per color for spanning-set monomials `z^d`: images
    /// of `Sym[z^d Z]` in the quotient depend on `z^d` only modulo
    /// `prod_c (z_v - c)^P`, where `P` accounts for the kernel and one
    /// difference factor per same-color pair.
    pub fn generator_bounds(&self) -> Result<Vec<usize>> {
        let offs = color_offsets(&self.dims);
        let mut pairs = Vec::new();
        for (i, &d) in self.dims.iter().enumerate() {
            for u in offs[i]..offs[i] + d {
                for w in u + 1..offs[i] + d {
                    pairs.push((Factor::Difference { b: w, a: u, r: self.rescale[u] - self.rescale[w] }, 1));
                }
            }
        }
        let mut p = vec![0usize; self.dims.len()];
        let mut centers: Vec<BTreeSet<i64>> = vec![BTreeSet::new(); self.dims.len()];
        for fr in &self.frames {
            let Some(po) = fr.pole_orders_with(&pairs)? else { continue };
            for (a, &c) in fr.ordering.iter().enumerate() {
                p[c] = p[c].max(po[a]);
                centers[c].insert(fr.centers[a] + self.rescale[fr.vars[a]]);
            }
        }
        Ok(p.iter().zip(&centers).map(|(&p, c)| p * c.len().max(1)).collect())
    }

    /// The same functionals with the columns recomputed on a new window;
    /// used for saturation checks.
    pub fn with_window(&self, window: Window) -> Result<FunctionalSpace> {
        build_space(self.dims.clone(), self.classes.clone(), self.frames.clone(), self.rescale.clone(), window)
    }

    /// A basis (as polynomials) of the kernel inside the column span.
    pub fn kernel_polys(&self) -> Result<Vec<LaurentPoly>> {
        let polys = self.column_polys();
        let rows: Vec<Vec<Scalar>> = self
            .all_rows()
            .iter()
            .map(|(fi, off)| polys.iter().map(|p| self.frames[*fi].apply(off, p)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let ns = nullspace(&rows, polys.len());
        Ok(ns
            .iter()
            .map(|v| {
                let mut f = LaurentPoly::zero(&self.dims);
                for (c, p) in v.iter().zip(&polys) {
                    if !c.is_zero() {
                        f = f.add(&p.scale(c));
                    }
                }
                f
            })
            .collect())
    }

    fn all_rows(&self) -> Vec<(usize, Vec<usize>)> {
        self.frames.iter().enumerate().flat_map(|(fi, fr)| fr.support.iter().map(move |j| (fi, j.clone()))).collect()
    }

    /// The columns as explicit polynomials.
    pub fn column_polys(&self) -> Vec<LaurentPoly> {
        match &self.columns {
            Columns::Monomial { polys } => polys.clone(),
            Columns::Shifted { centers, orbits } => orbits
                .iter()
                .map(|orbit| {
                    let mut out = LaurentPoly::zero(&self.dims);
                    for k in orbit {
                        let mut t = LaurentPoly::one(&self.dims);
                        for (v, &e) in k.iter().enumerate() {
                            if e > 0 {
                                let lin = LaurentPoly::var(&self.dims, v)
                                    .sub(&LaurentPoly::constant(&self.dims, Scalar::q_pow(centers[v])));
                                t = t.mul(&lin.pow(e as u32));
                            }
                        }
                        out = out.add(&t);
                    }
                    out
                })
                .collect(),
        }
    }
}

/// Multisets of size `k` from `0..bound`, as non-increasing sequences.
fn multisets(k: usize, bound: usize) -> Vec<Vec<usize>> {
    fn rec(k: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in (0..=max).rev() {
            cur.push(v);
            rec(k, v, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if bound == 0 {
        if k == 0 {
            out.push(vec![]);
        }
        return out;
    }
    rec(k, bound - 1, &mut Vec::new(), &mut out);
    out
}

/// Distinct permutations of a sequence.
fn distinct_permutations(seq: &[usize]) -> Vec<Vec<usize>> {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &v in seq {
        *counts.entry(v).or_insert(0) += 1;
    }
    let keys: Vec<usize> = counts.keys().copied().collect();
    let mut rem: Vec<usize> = counts.values().copied().collect();
    fn rec(keys: &[usize], rem: &mut [usize], cur: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in 0..keys.len() {
            if rem[i] > 0 {
                rem[i] -= 1;
                cur.push(keys[i]);
                rec(keys, rem, cur, n, out);
                cur.pop();
                rem[i] += 1;
            }
        }
    }
    let mut out = Vec::new();
    rec(&keys, &mut rem, &mut Vec::new(), seq.len(), &mut out);
    out
}

/// All ambient exponent vectors in the orbit of a per-class type.
fn orbit(classes: &[Vec<usize>], nvars: usize, ty: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut acc = vec![vec![0usize; nvars]];
    for (g, t) in classes.iter().zip(ty) {
        let perms = distinct_permutations(t);
        let mut next = Vec::with_capacity(acc.len() * perms.len());
        for base in &acc {
            for p in &perms {
                let mut e = base.clone();
                for (k, &v) in g.iter().enumerate() {
                    e[v] = p[k];
                }
                next.push(e);
            }
        }
        acc = next;
    }
    acc
}

fn type_of(classes: &[Vec<usize>], k: &[usize]) -> Vec<Vec<usize>> {
    classes
        .iter()
        .map(|g| {
            let mut t: Vec<usize> = g.iter().map(|&v| k[v]).collect();
            t.sort_unstable_by(|a, b| b.cmp(a));
            t
        })
        .collect()
}

/// Assembles the functional matrix of `frames` on the symmetric column
/// basis and computes its rank.
pub fn build_space(
    dims: Vec<usize>,
    classes: Vec<Vec<usize>>,
    frames: Vec<OrderedFrame>,
    rescale: Vec<i64>,
    window: Window,
) -> Result<FunctionalSpace> {
    let nvars: usize = dims.iter().sum();
    let mut class_of = vec![usize::MAX; nvars];
    for (ci, g) in classes.iter().enumerate() {
        for &v in g {
            class_of[v] = ci;
        }
    }
    if class_of.contains(&usize::MAX) {
        return Err(Error::NotAPartition("symmetry classes must cover all variables".into()));
    }
    let frames: Vec<OrderedFrame> = frames.into_iter().filter(|f| !f.kernel.is_zero()).collect();
    // certified monomial window per class
    let mut p = vec![0usize; classes.len()];
    let mut centers: Vec<BTreeSet<i64>> = vec![BTreeSet::new(); classes.len()];
    for fr in &frames {
        let po = fr.kernel.pole_orders().expect("nonzero kernel");
        for (a, &v) in fr.vars.iter().enumerate() {
            p[class_of[v]] = p[class_of[v]].max(po[a]);
            centers[class_of[v]].insert(fr.centers[a]);
        }
    }
    let required_per: Vec<usize> = p.iter().zip(&centers).map(|(&p, c)| p * c.len().max(1)).collect();
    let required = required_per.iter().copied().max().unwrap_or(0);
    let single_center = centers.iter().all(|c| c.len() <= 1);
    let (columns, used, certified) = match window {
        Window::Auto if single_center => {
            let mut types = BTreeSet::new();
            for fr in &frames {
                for j in &fr.support {
                    let mut k = vec![0usize; nvars];
                    for (a, &v) in fr.vars.iter().enumerate() {
                        k[v] = j[a];
                    }
                    types.insert(type_of(&classes, &k));
                }
            }
            let used = types.iter().flatten().flatten().map(|&e| e + 1).max().unwrap_or(0);
            let ctr: Vec<i64> = (0..nvars).map(|v| centers[class_of[v]].first().copied().unwrap_or(0)).collect();
            let orbits = types.iter().map(|t| orbit(&classes, nvars, t)).collect();
            (Columns::Shifted { centers: ctr, orbits }, used, true)
        }
        Window::Auto => (monomial_columns(&dims, &classes, &required_per), required, true),
        Window::Monomial(w) | Window::Unsafe(w) => {
            let certified = w >= required;
            if !certified && matches!(window, Window::Monomial(_)) {
                return Err(Error::UncertifiedWindow { requested: w, required });
            }
            (monomial_columns(&dims, &classes, &vec![w; classes.len()]), w, certified)
        }
    };
    let ncols = match &columns {
        Columns::Shifted { orbits, .. } => orbits.len(),
        Columns::Monomial { polys } => polys.len(),
    };
    let mut space = FunctionalSpace {
        dims,
        classes,
        frames,
        rescale,
        columns,
        basis_rows: Vec::new(),
        rank: 0,
        ncols,
        window: used,
        required,
        certified,
    };
    space.reduce_rows()?;
    Ok(space)
}

fn monomial_columns(dims: &[usize], classes: &[Vec<usize>], bounds: &[usize]) -> Columns {
    let nvars: usize = dims.iter().sum();
    let mut types: Vec<Vec<Vec<usize>>> = vec![vec![]];
    for (g, &b) in classes.iter().zip(bounds) {
        let ms = multisets(g.len(), b);
        types = types
            .iter()
            .flat_map(|t| {
                ms.iter().map(move |m| {
                    let mut t = t.clone();
                    t.push(m.clone());
                    t
                })
            })
            .collect();
    }
    let polys = par::map(&types, |t| {
        let mut p = LaurentPoly::zero(dims);
        for e in orbit(classes, nvars, t) {
            p.add_term(e.iter().map(|&x| x as i32).collect(), &Scalar::one());
        }
        p
    });
    Columns::Monomial { polys }
}

impl FunctionalSpace {
    fn row(&self, fi: usize, off: &[usize], locals: &[Vec<Vec<Vec<usize>>>]) -> Result<Vec<Scalar>> {
        let fr = &self.frames[fi];
        match &self.columns {
            Columns::Shifted { .. } => Ok(locals[fi].iter().map(|l| fr.kernel.weight_sum(off, l)).collect()),
            Columns::Monomial { polys } => polys.iter().map(|p| fr.apply(off, p)).collect(),
        }
    }

    /// Runs the elimination over all rows, keeping independent ones.
    fn reduce_rows(&mut self) -> Result<()> {
        let locals: Vec<Vec<Vec<Vec<usize>>>> = match &self.columns {
            Columns::Shifted { orbits, .. } => self
                .frames
                .iter()
                .map(|fr| {
                    orbits.iter().map(|o| o.iter().map(|k| fr.vars.iter().map(|&v| k[v]).collect()).collect()).collect()
                })
                .collect(),
            Columns::Monomial { .. } => vec![],
        };
        let rows = self.all_rows();
        let mut ech = Echelon::new(self.ncols);
        let mut basis = Vec::new();
        const CHUNK: usize = 128;
        for chunk in rows.chunks(CHUNK) {
            if ech.is_full() {
                break;
            }
            let vals = par::try_map(chunk, |(fi, off)| self.row(*fi, off, &locals))?;
            for (spec, v) in chunk.iter().zip(vals) {
                if ech.insert(&v) {
                    basis.push(spec.clone());
                    if ech.is_full() {
                        break;
                    }
                }
            }
        }
        self.rank = ech.rank();
        self.basis_rows = basis;
        Ok(())
    }
}

/// Assigns ambient variables to positions: the `k`-th occurrence of a label
/// takes the `k`-th ambient variable carrying that label.
fn assign_vars<L: Ord + Copy>(ambient: &[L], ordering: &[L]) -> Result<Vec<usize>> {
    let mut used = vec![false; ambient.len()];
    ordering
        .iter()
        .map(|l| {
            let v = (0..ambient.len())
                .find(|&v| !used[v] && ambient[v] == *l)
                .ok_or_else(|| Error::ShapeMismatch("ordering does not match the dimension vector".into()))?;
            used[v] = true;
            Ok(v)
        })
        .collect()
}

fn color_labels(dims: &[usize]) -> Vec<usize> {
    dims.iter().enumerate().flat_map(|(i, &d)| std::iter::repeat_n(i, d)).collect()
}

/// Frame of `Theta^m_{i_1..i_n}` in the quiver setting: residues at 1 of
/// `F / prod (z_a - 1)^{m_{i_a}} * prod_{a<b} (z_b - z_a)^{delta - #arrows(i_a -> i_b)}`.
pub fn quiver_frame(quiver: &Quiver, ordering: &[usize], dims: &[usize]) -> Result<OrderedFrame> {
    let vars = assign_vars(&color_labels(dims), ordering)?;
    let nvars = vars.len();
    let mut factors = Vec::new();
    for (a, &ia) in ordering.iter().enumerate() {
        factors.push((Factor::Linear { var: vars[a], shift: 0 }, quiver.framing[ia] as i32));
        for (b, &ib) in ordering.iter().enumerate().skip(a + 1) {
            let e = quiver.arrow_count(ia, ib) as i32 - i32::from(ia == ib);
            factors.push((Factor::Difference { b: vars[b], a: vars[a], r: 0 }, e));
        }
    }
    OrderedFrame::new(ordering.to_vec(), vec![0; nvars], vars, nvars, factors, None)
}

fn check_quiver_dims(quiver: &Quiver, n: &[usize]) -> Result<()> {
    if n.len() != quiver.num_vertices() {
        return Err(Error::ShapeMismatch(format!(
            "dimension vector of length {} for {} vertices",
            n.len(),
            quiver.num_vertices()
        )));
    }
    Ok(())
}

/// `Theta^m_{i_1..i_n}` on all Laurent polynomials in `n` variables.
pub fn theta_ordered(quiver: &Quiver, ordering: &[usize], window: Window) -> Result<FunctionalSpace> {
    if let Some(&i) = ordering.iter().find(|&&i| i >= quiver.num_vertices()) {
        return Err(Error::InvalidQuiver(format!("vertex {i} out of range")));
    }
    let n = ordering.len();
    let frame = {
        let vars: Vec<usize> = (0..n).collect();
        let mut factors = Vec::new();
        for (a, &ia) in ordering.iter().enumerate() {
            factors.push((Factor::Linear { var: a, shift: 0 }, quiver.framing[ia] as i32));
            for (b, &ib) in ordering.iter().enumerate().skip(a + 1) {
                let e = quiver.arrow_count(ia, ib) as i32 - i32::from(ia == ib);
                factors.push((Factor::Difference { b, a, r: 0 }, e));
            }
        }
        OrderedFrame::new(ordering.to_vec(), vec![0; n], vars, n, factors, None)?
    };
    let classes = (0..n).map(|v| vec![v]).collect();
    build_space(vec![1; n], classes, vec![frame], vec![0; n], window)
}

/// `Theta^m_n`: the intersection over all orderings, on color-symmetric
/// Laurent polynomials.
pub fn theta_intersected(quiver: &Quiver, n: &[usize], window: Window) -> Result<FunctionalSpace> {
    check_quiver_dims(quiver, n)?;
    let frames = par::try_map(&orderings(n), |o| quiver_frame(quiver, o, n))?;
    let nvars: usize = n.iter().sum();
    let classes = crate::exact_ring::sym::color_groups(n);
    build_space(n.to_vec(), classes, frames, vec![0; nvars], window)
}

/// Distinct orderings of a multiset of labels.
fn label_orderings(labels: &[(usize, i64)]) -> Vec<Vec<(usize, i64)>> {
    let distinct: Vec<(usize, i64)> = labels.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let counts: Vec<usize> = distinct.iter().map(|l| labels.iter().filter(|m| *m == l).count()).collect();
    orderings(&counts).into_iter().map(|o| o.into_iter().map(|k| distinct[k]).collect()).collect()
}

fn check_x(datum: &CartanDatum, x: &XPoint) -> Result<()> {
    if x.entries.len() != datum.rank() {
        return Err(Error::ShapeMismatch(format!("x has {} colors for rank {}", x.entries.len(), datum.rank())));
    }
    Ok(())
}

/// Frame of `Theta(psi)_x` for one ordering of the labels of `x`: residues
/// at `z_a = q^{s_a}` of
/// `F prod_a psi_{i_a}(z_a)/z_a / prod_{a<b} zeta_{i_b i_a}(z_b/z_a)`.
pub fn psi_frame(datum: &CartanDatum, x: &XPoint, psi: &EllWeight, labels: &[(usize, i64)]) -> Result<OrderedFrame> {
    let dims = x.dims();
    let colors = color_labels(&dims);
    let vars = assign_vars(&colors, &labels.iter().map(|l| l.0).collect::<Vec<_>>())?;
    let nvars = vars.len();
    let mut factors = Vec::new();
    let mut numer = LaurentPoly::one(&dims);
    let mut zpow = vec![0i32; nvars];
    for (a, &(ia, _)) in labels.iter().enumerate() {
        // psi_i(z)/z = prod_s (z - q^s)^{l - m} z^{sum m - sum l - 1}
        let mut net = -1i64;
        let keys: BTreeSet<i64> = psi.l.keys().chain(psi.m.keys()).filter(|k| k.0 == ia).map(|k| k.1).collect();
        for s in keys {
            let order = psi.pole_order(ia, s);
            net += order;
            factors.push((Factor::Linear { var: vars[a], shift: s }, order as i32));
        }
        zpow[vars[a]] += net as i32;
        for b in a + 1..labels.len() {
            let ib = labels[b].0;
            let (_, den) = zeta_ratio(datum, ib, ia, &dims, vars[b], vars[a]);
            // 1/zeta = den / ((z_b - q^-d z_a) * rest of zn)
            factors.push((Factor::Difference { b: vars[b], a: vars[a], r: -datum.d(ib, ia) }, 1));
            if let Some(d) = den {
                factors.push((d, -1));
            }
            match ib.cmp(&ia) {
                std::cmp::Ordering::Less => {
                    // zn = -(z_b - q^-d z_a)/z_a
                    zpow[vars[a]] += 1;
                    numer = numer.scale(&Scalar::from_int(-1));
                }
                std::cmp::Ordering::Greater => zpow[vars[b]] += 1,
                std::cmp::Ordering::Equal => {}
            }
        }
    }
    numer = numer.mul_monomial(&zpow, &Scalar::one());
    let centers = labels.iter().map(|l| l.1).collect();
    OrderedFrame::new(labels.iter().map(|l| l.0).collect(), centers, vars, nvars, factors, Some(numer))
}

/// `Theta(psi)_x` on color-symmetric Laurent polynomials.
pub fn theta_psi_x(datum: &CartanDatum, x: &XPoint, psi: &EllWeight, window: Window) -> Result<FunctionalSpace> {
    check_x(datum, x)?;
    let frames = par::try_map(&label_orderings(&x.labels()), |o| psi_frame(datum, x, psi, o))?;
    let dims = x.dims();
    let classes = crate::exact_ring::sym::color_groups(&dims);
    build_space(dims, classes, frames, vec![0; x.total()], window)
}

/// Frame of the graded ideal `Theta^m_x` for one ordering of the labels:
/// residues at 1 of `F / prod (z_a - 1)^{m_a}` times
/// `prod_{a<b} (z_b - z_a)^{delta_{(i_a,s_a) = (i_b,s_b)} - delta_{s_a = s_b + d_{i_a i_b}}}`.
pub fn graded_frame(
    datum: &CartanDatum,
    x: &XPoint,
    m: &dyn Fn(usize, i64) -> i64,
    labels: &[(usize, i64)],
) -> Result<OrderedFrame> {
    let vars = assign_vars(&x.labels(), labels)?;
    let nvars = vars.len();
    let mut factors = Vec::new();
    for (a, &(ia, sa)) in labels.iter().enumerate() {
        factors.push((Factor::Linear { var: vars[a], shift: 0 }, m(ia, sa) as i32));
        for (b, &(ib, sb)) in labels.iter().enumerate().skip(a + 1) {
            let e = i32::from(sa == sb + datum.d(ia, ib)) - i32::from((ia, sa) == (ib, sb));
            factors.push((Factor::Difference { b: vars[b], a: vars[a], r: 0 }, e));
        }
    }
    OrderedFrame::new(labels.iter().map(|l| l.0).collect(), vec![0; nvars], vars, nvars, factors, None)
}

/// Symmetry classes of `V_x`: variables with equal `(color, s)`.
pub fn graded_classes(x: &XPoint) -> Vec<Vec<usize>> {
    let mut by: BTreeMap<(usize, i64), Vec<usize>> = BTreeMap::new();
    for (v, l) in x.labels().into_iter().enumerate() {
        by.entry(l).or_default().push(v);
    }
    by.into_values().collect()
}

/// The graded ideal `Theta^m_x` on `V_x` with pole orders `m(i, s)`.
pub fn theta_x_graded(
    datum: &CartanDatum,
    x: &XPoint,
    m: &(dyn Fn(usize, i64) -> i64 + Sync),
    window: Window,
) -> Result<FunctionalSpace> {
    check_x(datum, x)?;
    let frames = par::try_map(&label_orderings(&x.labels()), |o| graded_frame(datum, x, m, o))?;
    let rescale = x.labels().iter().map(|l| l.1).collect();
    build_space(x.dims(), graded_classes(x), frames, rescale, window)
}

/// `Theta^m_x` with `m` the pole orders of `psi` at the entries of `x`.
pub fn theta_x_for_psi(datum: &CartanDatum, x: &XPoint, psi: &EllWeight, window: Window) -> Result<FunctionalSpace> {
    theta_x_graded(datum, x, &|i, s| psi.pole_order(i, s), window)
}

/// `z_{ia} -> z_{ia} x_{ia}`.
pub fn rescale_to_graded(f: &LaurentPoly, x: &XPoint) -> Result<LaurentPoly> {
    if f.dims() != x.dims().as_slice() {
        return Err(Error::ShapeMismatch(format!("polynomial dims {:?} but x dims {:?}", f.dims(), x.dims())));
    }
    let s: Vec<i64> = x.labels().iter().map(|l| l.1).collect();
    Ok(f.rescale(&s))
}

/// Head counts of a collection.
pub fn collection_dims(quiver: &Quiver, s: &AcceptableCollection) -> Vec<usize> {
    let mut n = vec![0; quiver.num_vertices()];
    for p in &s.paths {
        n[p.head(quiver)] += 1;
    }
    n
}

fn origins_below(quiver: &Quiver, s: &AcceptableCollection, a: usize, order: PathOrder, strict: bool) -> i32 {
    let pa = &s.paths[a];
    let i = pa.head(quiver);
    (1..=quiver.framing[i])
        .filter(|&l| {
            let o = crate::quiver_cells::FramedPath::origin(i, l);
            if strict {
                order.less(&o, pa)
            } else {
                !order.less(pa, &o)
            }
        })
        .count() as i32
}

fn arrows_below(quiver: &Quiver, s: &AcceptableCollection, a: usize, b: usize, order: PathOrder, strict: bool) -> i32 {
    let (pa, pb) = (&s.paths[a], &s.paths[b]);
    let (ia, ib) = (pa.head(quiver), pb.head(quiver));
    quiver
        .arrows
        .iter()
        .enumerate()
        .filter(|&(e, &(t, h))| {
            if t != ia || h != ib {
                return false;
            }
            let ep = pa.extend(e);
            if strict {
                order.less(&ep, pb)
            } else {
                !order.less(pb, &ep)
            }
        })
        .count() as i32
}

/// The frame of `mu_S`.
pub fn mu_frame(quiver: &Quiver, s: &AcceptableCollection, order: PathOrder) -> Result<OrderedFrame> {
    if !s.is_acceptable(quiver, order) {
        return Err(Error::InvalidQuiver("collection is not acceptable".into()));
    }
    let ordering = s.ordering(quiver);
    let dims = collection_dims(quiver, s);
    let vars = assign_vars(&color_labels(&dims), &ordering)?;
    let nvars = vars.len();
    let mut factors = Vec::new();
    for a in 0..ordering.len() {
        factors.push((Factor::Linear { var: vars[a], shift: 0 }, origins_below(quiver, s, a, order, false)));
        for b in a + 1..ordering.len() {
            let e = arrows_below(quiver, s, a, b, order, false) - i32::from(ordering[a] == ordering[b]);
            factors.push((Factor::Difference { b: vars[b], a: vars[a], r: 0 }, e));
        }
    }
    OrderedFrame::new(ordering, vec![0; nvars], vars, nvars, factors, None)
}

/// `mu_S(F)` for a Laurent polynomial in the variables of the head counts
/// of `S` (first position extracted first).
pub fn mu(quiver: &Quiver, s: &AcceptableCollection, f: &LaurentPoly, order: PathOrder) -> Result<Scalar> {
    let fr = mu_frame(quiver, s, order)?;
    if f.dims() != collection_dims(quiver, s).as_slice() {
        return Err(Error::ShapeMismatch("polynomial does not match the collection".into()));
    }
    fr.apply(&[], f)
}

/// `F_S = Sym[N / prod_{same color a<b} (z_b - z_a)]` (a plain sum over
/// color-preserving permutations, so that `mu_S(F_S) = +-1`) with
/// `N = prod_a (z_a - 1)^{#{o < p_a}} prod_{a<b} (z_b - z_a)^{#{e : e p_a < p_b}}`.
pub fn f_s(quiver: &Quiver, s: &AcceptableCollection, order: PathOrder) -> Result<LaurentPoly> {
    let ordering = s.ordering(quiver);
    let dims = collection_dims(quiver, s);
    let vars = assign_vars(&color_labels(&dims), &ordering)?;
    let mut numer = LaurentPoly::one(&dims);
    for a in 0..ordering.len() {
        let k = origins_below(quiver, s, a, order, true);
        numer = numer.mul(&Factor::Linear { var: vars[a], shift: 0 }.to_poly(&dims).pow(k as u32));
        for b in a + 1..ordering.len() {
            let k = arrows_below(quiver, s, a, b, order, true);
            numer = numer.mul(&Factor::Difference { b: vars[b], a: vars[a], r: 0 }.to_poly(&dims).pow(k as u32));
        }
    }
    sym_over_vandermonde(&numer)
}

/// The family `F_S` for a list of collections.
pub fn f_s_basis(quiver: &Quiver, cells: &[AcceptableCollection], order: PathOrder) -> Result<Vec<LaurentPoly>> {
    par::try_map(cells, |s| f_s(quiver, s, order))
}

/// `[mu_{S'}(F_S)]` with rows `S'` and columns `S` in the given order.
pub fn triangularity_matrix(
    quiver: &Quiver,
    cells: &[AcceptableCollection],
    order: PathOrder,
) -> Result<Vec<Vec<Scalar>>> {
    let fs = f_s_basis(quiver, cells, order)?;
    let frames = par::try_map(cells, |s| mu_frame(quiver, s, order))?;
    par::try_map(&frames, |fr| fs.iter().map(|f| fr.apply(&[], f)).collect::<Result<Vec<_>>>())
}

/// Whether `m` is lower triangular (zero above the diagonal: `mu_{S'}(F_S)`
/// vanishes for `S' < S`) with every diagonal entry `+1` or `-1`.
pub fn is_unit_triangular(m: &[Vec<Scalar>]) -> bool {
    let minus_one = Scalar::from_int(-1);
    m.iter().enumerate().all(|(r, row)| {
        row.iter().enumerate().all(|(c, v)| match r.cmp(&c) {
            std::cmp::Ordering::Less => v.is_zero(),
            std::cmp::Ordering::Equal => v.is_one() || *v == minus_one,
            std::cmp::Ordering::Greater => true,
        })
    })
}

/// The space of functionals `mu_{S'}` for the given collections, on
/// color-symmetric polynomials with head counts `n`.
pub fn mu_space(
    quiver: &Quiver,
    cells: &[AcceptableCollection],
    n: &[usize],
    order: PathOrder,
    window: Window,
) -> Result<FunctionalSpace> {
    let frames = par::try_map(cells, |s| mu_frame(quiver, s, order))?;
    let nvars: usize = n.iter().sum();
    build_space(n.to_vec(), crate::exact_ring::sym::color_groups(n), frames, vec![0; nvars], window)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver_cells::enumerate_acceptable;

    #[test]
    fn ordered_examples() {
        let one = Quiver::one_vertex(1, 0);
        assert_eq!(theta_ordered(&one, &[0], Window::Auto).unwrap().corank(), 1);
        let jordan = Quiver::one_vertex(1, 1);
        assert_eq!(theta_ordered(&jordan, &[0, 0], Window::Auto).unwrap().corank(), 1);
        let three = Quiver::one_vertex(3, 0);
        assert_eq!(theta_ordered(&three, &[0, 0], Window::Auto).unwrap().corank(), 6);
    }

    #[test]
    fn intersected_examples() {
        let three = Quiver::one_vertex(3, 0);
        assert_eq!(theta_intersected(&three, &[2], Window::Auto).unwrap().corank(), 3);
        let jordan = Quiver::one_vertex(1, 1);
        assert_eq!(theta_intersected(&jordan, &[2], Window::Auto).unwrap().corank(), 1);
        assert_eq!(theta_intersected(&three, &[0], Window::Auto).unwrap().corank(), 1);
    }

    #[test]
    fn monomial_window_agrees() {
        let three = Quiver::one_vertex(3, 0);
        let auto = theta_intersected(&three, &[2], Window::Auto).unwrap();
        let req = auto.required;
        for w in [req, req + 1] {
            assert_eq!(auto.with_window(Window::Monomial(w)).unwrap().corank(), 3);
        }
        assert!(matches!(auto.with_window(Window::Monomial(req - 1)), Err(Error::UncertifiedWindow { .. })));
        assert!(!auto.with_window(Window::Unsafe(req - 1)).unwrap().certified);
    }

    #[test]
    fn mu_of_constant() {
        let q = Quiver::one_vertex(1, 0);
        let cells = enumerate_acceptable(&q, &[1], PathOrder::default());
        for d in -2..3 {
            let f = LaurentPoly::monomial(&[1], vec![d], Scalar::one());
            assert!(mu(&q, &cells[0], &f, PathOrder::default()).unwrap().is_one());
        }
    }

    #[test]
    fn triangular_small() {
        for (q, n) in [(Quiver::one_vertex(2, 0), 2), (Quiver::one_vertex(1, 1), 2), (Quiver::one_vertex(3, 0), 2)] {
            let cells = enumerate_acceptable(&q, &[n], PathOrder::default());
            let m = triangularity_matrix(&q, &cells, PathOrder::default()).unwrap();
            assert!(is_unit_triangular(&m), "{m:?}");
        }
    }

    #[test]
    fn rescale_monomial() {
        let x = XPoint::new(vec![vec![2]]);
        let f = LaurentPoly::var(&[1], 0);
        assert_eq!(rescale_to_graded(&f, &x).unwrap(), f.scale(&Scalar::q_pow(2)));
        let c = LaurentPoly::constant(&[1], Scalar::from_int(5));
        assert_eq!(rescale_to_graded(&c, &x).unwrap(), c);
    }
}
