//! The acceptance battery: oracle checks over generated and bundled
//! instances, one report line per criterion.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::exact_ring::sym::{color_groups, sym, SymMode};
use crate::exact_ring::{LaurentPoly, Scalar};
use crate::par;
use crate::quiver_cells::{
    collection_sets, enumerate_acceptable, grassmannian_euler, orderings, tower_rank_product, AcceptableCollection,
    PathOrder,
};
use crate::root_data::{CartanDatum, DatumFile, Quiver};
use crate::shuffle_mod::{
    assemble_character, euler_at, euler_comparable, generator, module_dimension, module_dimension_twisted,
    points_in_window, shuffle_product, wheel_check_finite, CharacterOptions, EllWeight, WheelOutcome, XPoint,
};
use crate::theta_ideals::{
    is_unit_triangular, mu, mu_space, theta_intersected, theta_ordered, theta_psi_x, theta_x_for_psi,
    triangularity_matrix, Window,
};
use crate::{Error, Result};

pub const DEFAULT_SEED: u64 = 20_240_917;

/// Number of random quivers in the generated battery.
pub const RANDOM_QUIVERS: usize = 12;

/// `(id, name, time limit in seconds)` for every criterion.
pub const CRITERIA: [(u8, &str, f64); 11] = [
    (1, "grassmannian oracle", 10.0),
    (2, "jordan quiver oracle", 5.0),
    (3, "quotient dimension battery", 120.0),
    (4, "ordered ideal tower ranks", 120.0),
    (5, "triangularity", 120.0),
    (6, "ideal property", 60.0),
    (7, "shuffle sanity", 60.0),
    (8, "route equality", 300.0),
    (9, "graded rewrite", 300.0),
    (10, "character total", 120.0),
    (11, "order invariance", 60.0),
];

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub instances: usize,
    pub detail: String,
    pub seconds: f64,
    pub limit_seconds: f64,
}

impl CriterionReport {
    pub fn within_limit(&self) -> bool {
        self.seconds < self.limit_seconds
    }

    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {:<28} {:>5} instances {:>8.2}s / {:>5.0}s  {}",
            if self.passed { "pass" } else { "FAIL" },
            self.id,
            self.name,
            self.instances,
            self.seconds,
            self.limit_seconds,
            self.detail
        )
    }
}

/// Outcome of one check: how many instances ran and what went wrong.
#[derive(Default)]
struct Tally {
    instances: usize,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.instances += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn merge(&mut self, other: Tally) {
        self.instances += other.instances;
        self.failures.extend(other.failures);
        self.notes.extend(other.notes);
    }
}

/// A quiver with head counts.
#[derive(Clone, Debug)]
pub struct Instance {
    pub quiver: Quiver,
    pub n: Vec<usize>,
}

impl Instance {
    fn label(&self) -> String {
        format!("arrows {:?} framing {:?} n {:?}", self.quiver.arrows, self.quiver.framing, self.n)
    }
}

pub fn grassmannian_instances() -> Vec<Instance> {
    let mut out = Vec::new();
    for m in 1..=5u32 {
        for n in 1..=m as usize {
            out.push(Instance { quiver: Quiver::one_vertex(m, 0), n: vec![n] });
        }
    }
    out
}

pub fn jordan_instances() -> Vec<Instance> {
    (0..=4).map(|n| Instance { quiver: Quiver::one_vertex(1, 1), n: vec![n] }).collect()
}

/// Distinct quivers with at most two vertices and two arrows (loops
/// allowed) and nonzero framing with entries at most 2.
pub fn random_quivers(seed: u64, count: usize) -> Vec<Quiver> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Quiver> = Vec::new();
    while out.len() < count {
        let k = rng.gen_range(1..=2usize);
        let mut arrows: Vec<(usize, usize)> =
            (0..rng.gen_range(0..=2)).map(|_| (rng.gen_range(0..k), rng.gen_range(0..k))).collect();
        arrows.sort_unstable();
        let framing: Vec<u32> = (0..k).map(|_| rng.gen_range(0..=2)).collect();
        if framing.iter().all(|&m| m == 0) {
            continue;
        }
        let names = (0..k).map(|i| format!("v{i}")).collect();
        let q = Quiver::new(names, arrows, framing).expect("generated quiver is valid");
        if !out.contains(&q) {
            out.push(q);
        }
    }
    out
}

fn small_dims(k: usize, max_total: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..k {
        out = out.into_iter().flat_map(|d| (0..=max_total).map(move |x| [d.clone(), vec![x]].concat())).collect();
    }
    out.retain(|d| {
        let t: usize = d.iter().sum();
        t >= 1 && t <= max_total
    });
    out
}

pub fn random_instances(seed: u64) -> Vec<Instance> {
    random_quivers(seed, RANDOM_QUIVERS)
        .into_iter()
        .flat_map(|q| small_dims(q.num_vertices(), 3).into_iter().map(move |n| Instance { quiver: q.clone(), n }))
        .collect()
}

fn collect<T: Send + Sync>(items: &[T], f: impl Fn(&T) -> Result<Tally> + Sync + Send) -> Result<Tally> {
    let mut t = Tally::default();
    for r in par::try_map(items, f)? {
        t.merge(r);
    }
    Ok(t)
}

fn binomial(m: usize, n: usize) -> usize {
    (0..n).fold(1, |acc, k| acc * (m - k) / (k + 1))
}

fn count_and_corank(inst: &Instance, expect: usize) -> Result<Tally> {
    let mut t = Tally::default();
    let count = enumerate_acceptable(&inst.quiver, &inst.n, PathOrder::default()).len();
    let corank = theta_intersected(&inst.quiver, &inst.n, Window::Auto)?.corank();
    t.check(count == expect && corank == expect, || {
        format!("{}: count {count}, corank {corank}, expected {expect}", inst.label())
    });
    Ok(t)
}

fn criterion_1() -> Result<Tally> {
    collect(&grassmannian_instances(), |inst| {
        let m = inst.quiver.framing[0] as usize;
        count_and_corank(inst, binomial(m, inst.n[0]))
    })
}

fn criterion_2() -> Result<Tally> {
    collect(&jordan_instances(), |inst| {
        let mut t = count_and_corank(inst, 1)?;
        let e = grassmannian_euler(&inst.quiver, &inst.n);
        t.check(e == 1, || format!("{}: nilpotent euler {e}", inst.label()));
        Ok(t)
    })
}

fn criterion_3(seed: u64) -> Result<Tally> {
    collect(&random_instances(seed), |inst| {
        let count = enumerate_acceptable(&inst.quiver, &inst.n, PathOrder::default()).len();
        count_and_corank(inst, count)
    })
}

fn criterion_4(seed: u64) -> Result<Tally> {
    let jobs: Vec<(Instance, Vec<usize>)> = random_instances(seed)
        .into_iter()
        .flat_map(|inst| orderings(&inst.n).into_iter().map(move |o| (inst.clone(), o)))
        .collect();
    collect(&jobs, |(inst, o)| {
        let mut t = Tally::default();
        let corank = theta_ordered(&inst.quiver, o, Window::Auto)?.corank() as u64;
        let tower = tower_rank_product(&inst.quiver, o);
        t.check(corank == tower, || format!("{} ordering {o:?}: corank {corank}, tower {tower}", inst.label()));
        Ok(t)
    })
}

fn criterion_5(seed: u64) -> Result<Tally> {
    collect(&random_instances(seed), |inst| {
        let mut t = Tally::default();
        let cells = enumerate_acceptable(&inst.quiver, &inst.n, PathOrder::default());
        if cells.is_empty() {
            return Ok(t);
        }
        let m = triangularity_matrix(&inst.quiver, &cells, PathOrder::default())?;
        t.check(is_unit_triangular(&m), || format!("{}: not unit triangular", inst.label()));
        Ok(t)
    })
}

/// A random color-symmetric Laurent polynomial with small exponents.
fn random_symmetric(rng: &mut ChaCha8Rng, dims: &[usize]) -> Result<LaurentPoly> {
    let nvars: usize = dims.iter().sum();
    let mut g = LaurentPoly::constant(dims, Scalar::from_int(rng.gen_range(-2..=2)));
    for _ in 0..rng.gen_range(1..=2) {
        let e: Vec<i32> = (0..nvars).map(|_| rng.gen_range(-1..=2)).collect();
        let c = &Scalar::from_int(rng.gen_range(1..=3)) * &Scalar::q_pow(rng.gen_range(-1..=1));
        g = g.add(&sym(&LaurentPoly::monomial(dims, e, c), &color_groups(dims), SymMode::Sum)?);
    }
    Ok(g)
}

fn criterion_6(seed: u64) -> Result<Tally> {
    let pool: Vec<(Instance, Vec<AcceptableCollection>)> = random_instances(seed)
        .into_iter()
        .filter_map(|inst| {
            let cells = enumerate_acceptable(&inst.quiver, &inst.n, PathOrder::default());
            (!cells.is_empty()).then_some((inst, cells))
        })
        .collect();
    if pool.is_empty() {
        return Err(Error::CrossCheck("no instance with cells".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6);
    let picks: Vec<(usize, usize)> = (0..50)
        .map(|_| {
            let p = rng.gen_range(0..pool.len());
            (p, rng.gen_range(0..pool[p].1.len()))
        })
        .collect();
    // kernels of {mu_S' : S' <= S} on a window one past the certified bound
    let mut keys: Vec<(usize, usize)> = picks.clone();
    keys.sort_unstable();
    keys.dedup();
    let kernels: BTreeMap<(usize, usize), Vec<LaurentPoly>> = keys
        .iter()
        .copied()
        .zip(par::try_map(&keys, |&(p, k)| {
            let (inst, cells) = &pool[p];
            let auto = mu_space(&inst.quiver, &cells[..=k], &inst.n, PathOrder::default(), Window::Auto)?;
            auto.with_window(Window::Monomial(auto.required + 1))?.kernel_polys()
        })?)
        .collect();
    let jobs: Vec<(usize, usize, u64)> = picks.iter().map(|&(p, k)| (p, k, rng.gen())).collect();
    let mut t = collect(&jobs, |&(p, k, s)| {
        let mut t = Tally::default();
        let (inst, cells) = &pool[p];
        let basis = &kernels[&(p, k)];
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let mut f = LaurentPoly::zero(&inst.n);
        for b in basis {
            f = f.add(&b.scale(&Scalar::from_int(rng.gen_range(-2..=2))));
        }
        if basis.is_empty() || f.is_zero() {
            t.notes.push("zero F".into());
        }
        let g = random_symmetric(&mut rng, &inst.n)?;
        let fg = f.mul(&g);
        let mut ok = true;
        for s2 in &cells[..=k] {
            ok &= mu(&inst.quiver, s2, &f, PathOrder::default())?.is_zero();
            ok &= mu(&inst.quiver, s2, &fg, PathOrder::default())?.is_zero();
        }
        t.check(ok, || format!("{} below cell {k}: mu(FG) != 0", inst.label()));
        Ok(t)
    })?;
    let zero = t.notes.len();
    t.notes = vec![format!("{} nonzero F", t.instances - zero)];
    Ok(t)
}

fn one_box(rank: usize, i: usize, e: i32) -> LaurentPoly {
    let mut dims = vec![0; rank];
    dims[i] = 1;
    LaurentPoly::monomial(&dims, vec![e], Scalar::one())
}

fn criterion_7(seed: u64) -> Result<Tally> {
    let mut t = Tally::default();
    let a1 = CartanDatum::sl2();
    let one = LaurentPoly::one(&[1]);
    let p = shuffle_product(&a1, &one, &one)?;
    let expect = LaurentPoly::constant(&[2], &Scalar::one() + &Scalar::q_pow(-2));
    t.check(p == expect, || "1 * 1 != 1 + q^-2 on sl2".into());

    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7);
    let mut jobs = Vec::new();
    for datum in [a1.clone(), CartanDatum::type_a(2)] {
        let r = datum.rank();
        let mut seqs: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..3 {
            seqs = seqs.iter().flat_map(|s| (0..r).map(move |i| [s.clone(), vec![i]].concat())).collect();
            for s in &seqs {
                for _ in 0..2 {
                    let d: Vec<i32> = s.iter().map(|_| rng.gen_range(-1..=1)).collect();
                    jobs.push((datum.clone(), s.clone(), d));
                }
            }
        }
    }
    t.merge(collect(&jobs, |(datum, o, d)| {
        let mut t = Tally::default();
        let r = datum.rank();
        let mut acc = LaurentPoly::one(&vec![0; r]);
        for (&i, &e) in o.iter().zip(d) {
            acc = shuffle_product(datum, &acc, &one_box(r, i, e))?;
        }
        let g = generator(datum, o, d)?;
        t.check(acc == g, || format!("rank {r} ordering {o:?} d {d:?}: product differs from generator"));
        Ok(t)
    })?);

    let a2 = CartanDatum::type_a(2);
    let mut wheel_jobs = Vec::new();
    for o in orderings(&[2, 1]) {
        for k in 0..27 {
            let d = vec![k % 3 - 1, (k / 3) % 3 - 1, k / 9 - 1];
            wheel_jobs.push((o.clone(), d));
        }
    }
    t.merge(collect(&wheel_jobs, |(o, d)| {
        let mut t = Tally::default();
        let g = generator(&a2, o, d)?;
        for (i, j) in [(0, 1), (1, 0)] {
            let w = wheel_check_finite(&g, &a2, i, j)?;
            t.check(w != WheelOutcome::Fail, || format!("generator {o:?} {d:?} fails wheel ({i},{j})"));
        }
        Ok(t)
    })?);
    Ok(t)
}

/// Highest l-weights for the sl2 battery.
pub fn sl2_weights() -> Vec<EllWeight> {
    let a = CartanDatum::sl2();
    let m = |v: &[(i64, u32)]| v.iter().map(|&(s, k)| ((0usize, s), k)).collect::<BTreeMap<_, _>>();
    vec![
        EllWeight::fundamental(&a, 0, 0),
        EllWeight::prefundamental(0, 0),
        EllWeight::new(BTreeMap::new(), m(&[(0, 1), (2, 1)])),
        EllWeight::new(BTreeMap::new(), m(&[(0, 2)])),
        EllWeight::new(m(&[(3, 1)]), m(&[(0, 1)])),
    ]
}

/// `(psi, x)` pairs with `sum n <= 3` and entries in the two steps below
/// the support of `psi`.
pub fn sl2_battery() -> Vec<(EllWeight, XPoint)> {
    let mut out = Vec::new();
    for psi in sl2_weights() {
        let s: Vec<i64> = psi.l.keys().chain(psi.m.keys()).map(|k| k.1).collect();
        let (lo, hi) = (*s.iter().min().unwrap_or(&0), *s.iter().max().unwrap_or(&0));
        for x in points_in_window(1, 3, lo - 2, hi) {
            out.push((psi.clone(), x));
        }
    }
    out
}

fn criterion_8() -> Result<Tally> {
    let a = CartanDatum::sl2();
    let mut t = collect(&sl2_battery(), |(psi, x)| {
        let mut t = Tally::default();
        let d = module_dimension(&a, x, psi, Window::Auto)?;
        let tw = module_dimension_twisted(&a, x, psi, Window::Auto)?;
        t.check(d.dim == tw.dim && d.dim <= d.corank, || {
            format!("psi {:?} x {:?}: {} vs twisted {} (corank {})", psi, x.entries, d.dim, tw.dim, d.corank)
        });
        if d.dim > 0 {
            t.notes.push(String::new());
        }
        Ok(t)
    })?;
    t.notes = vec![format!("{} nonzero", t.notes.len())];
    Ok(t)
}

fn criterion_9() -> Result<Tally> {
    let a = CartanDatum::sl2();
    collect(&sl2_battery(), |(psi, x)| {
        let mut t = Tally::default();
        let c1 = theta_psi_x(&a, x, psi, Window::Auto)?.corank();
        let c2 = theta_x_for_psi(&a, x, psi, Window::Auto)?.corank();
        t.check(c1 == c2, || format!("psi {:?} x {:?}: corank {c1} vs graded {c2}", psi, x.entries));
        Ok(t)
    })
}

fn criterion_10() -> Result<Tally> {
    let a = CartanDatum::sl2();
    let psi = EllWeight::fundamental(&a, 0, 0);
    let mut t = Tally::default();
    let opts = CharacterOptions { max_total: 3, pad: 2, window: Window::Auto, check_routes: true };
    let table = assemble_character(&a, &psi, opts)?;
    let total: usize = table.entries.iter().map(|e| e.dim).sum();
    t.check(total == 2, || format!("character total {total}"));
    let points = points_in_window(1, 3, table.s_range.0, table.s_range.1);
    t.merge(collect(&points, |x| {
        let mut t = Tally::default();
        if euler_comparable(&a, x, &psi) {
            let d = module_dimension(&a, x, &psi, Window::Auto)?.dim;
            let e = euler_at(&a, x, &psi);
            t.check(d == e, || format!("x {:?}: dim {d}, euler {e}", x.entries));
        }
        Ok(t)
    })?);
    Ok(t)
}

fn criterion_11(seed: u64) -> Result<Tally> {
    let mut all = grassmannian_instances();
    all.extend(jordan_instances());
    all.extend(random_instances(seed));
    let mut t = collect(&all, |inst| {
        let mut t = Tally::default();
        let a = enumerate_acceptable(&inst.quiver, &inst.n, PathOrder::LengthLex);
        let b = enumerate_acceptable(&inst.quiver, &inst.n, PathOrder::ReversedSlot);
        t.check(a.len() == b.len(), || format!("{}: {} vs {}", inst.label(), a.len(), b.len()));
        if collection_sets(&a) != collection_sets(&b) {
            t.notes.push(String::new());
        }
        Ok(t)
    })?;
    t.notes = vec![format!("{} with different path sets", t.notes.len())];
    Ok(t)
}

/// Runs criterion `id` (1..=11).
pub fn run_criterion(id: u8, seed: u64) -> CriterionReport {
    let (_, name, limit) = CRITERIA.iter().copied().find(|c| c.0 == id).expect("criterion id in 1..=11");
    let start = Instant::now();
    let out = match id {
        1 => criterion_1(),
        2 => criterion_2(),
        3 => criterion_3(seed),
        4 => criterion_4(seed),
        5 => criterion_5(seed),
        6 => criterion_6(seed),
        7 => criterion_7(seed),
        8 => criterion_8(),
        9 => criterion_9(),
        10 => criterion_10(),
        _ => criterion_11(seed),
    };
    let seconds = start.elapsed().as_secs_f64();
    let (passed, instances, detail) = match out {
        Ok(t) => {
            let mut detail: Vec<String> = t.failures.iter().take(3).cloned().collect();
            if t.failures.len() > 3 {
                detail.push(format!("and {} more", t.failures.len() - 3));
            }
            detail.extend(t.notes.iter().filter(|n| !n.is_empty()).cloned());
            (t.failures.is_empty() && t.instances > 0, t.instances, detail.join("; "))
        }
        Err(e) => (false, 0, format!("error: {e}")),
    };
    CriterionReport { id, name: name.into(), passed, instances, detail, seconds, limit_seconds: limit }
}

pub fn run_all(seed: u64) -> Vec<CriterionReport> {
    CRITERIA.iter().map(|c| run_criterion(c.0, seed)).collect()
}

/// A bundled quiver instance with expected values.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Fixture {
    pub name: String,
    pub quiver: DatumFile,
    pub n: Vec<usize>,
    #[serde(default)]
    pub count: Option<usize>,
    #[serde(default)]
    pub corank: Option<usize>,
    #[serde(default)]
    pub euler: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FixtureReport {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

pub fn check_fixture(f: &Fixture) -> FixtureReport {
    let run = || -> Result<Vec<String>> {
        let q = f.quiver.quiver()?;
        if f.n.len() != q.num_vertices() {
            return Err(Error::ShapeMismatch(format!("n has {} entries for {} vertices", f.n.len(), q.num_vertices())));
        }
        let mut bad = Vec::new();
        let count = enumerate_acceptable(&q, &f.n, PathOrder::default()).len();
        if let Some(c) = f.count.filter(|&c| c != count) {
            bad.push(format!("count {count}, expected {c}"));
        }
        if let Some(c) = f.corank {
            let got = theta_intersected(&q, &f.n, Window::Auto)?.corank();
            if got != c {
                bad.push(format!("corank {got}, expected {c}"));
            }
        }
        if let Some(e) = f.euler {
            let got = grassmannian_euler(&q, &f.n);
            if got != e {
                bad.push(format!("euler {got}, expected {e}"));
            }
        }
        Ok(bad)
    };
    let (passed, detail) = match run() {
        Ok(bad) => (bad.is_empty(), bad.join("; ")),
        Err(e) => (false, format!("error: {e}")),
    };
    FixtureReport { name: f.name.clone(), passed, detail }
}
