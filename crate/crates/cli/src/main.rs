use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qshuffle::battery::{self, check_fixture, Fixture, CRITERIA, DEFAULT_SEED};
use qshuffle::exact_ring::LaurentPoly;
use qshuffle::quiver_cells::{dimension_histogram, enumerate_acceptable, tower_rank_product, PathOrder};
use qshuffle::root_data::{CartanDatum, DatumFile, Quiver};
use qshuffle::shuffle_mod::{
    assemble_character, shuffle_product, wheel_check_finite, CharacterOptions, EllWeight, XPoint,
};
use qshuffle::theta_ideals::{theta_intersected, theta_ordered, theta_psi_x, Window};
use qshuffle::{par, Error};

const BUNDLED_FIXTURES: [(&str, &str); 5] = [
    ("grassmannian_3_2", include_str!("../fixtures/battery/grassmannian_3_2.json")),
    ("grassmannian_5_2", include_str!("../fixtures/battery/grassmannian_5_2.json")),
    ("jordan_3", include_str!("../fixtures/battery/jordan_3.json")),
    ("a2_arrow", include_str!("../fixtures/battery/a2_arrow.json")),
    ("empty_dimension", include_str!("../fixtures/battery/empty_dimension.json")),
];

#[derive(Parser)]
#[command(name = "qshuffle", version, about = "Framed quiver cells, residue ideals and shuffle algebra dimensions")]
struct Cli {
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, env = "QSHUFFLE_JOBS", default_value_t = 0)]
    jobs: usize,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Accept truncation windows below the certified bound.
    #[arg(long, global = true)]
    unsafe_window: bool,
    /// Write the JSON result here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cartan data.
    Cartan {
        #[command(subcommand)]
        op: CartanOp,
    },
    /// Acceptable collections of framed paths.
    Cells {
        #[command(subcommand)]
        op: CellsOp,
    },
    /// Residue ideals.
    Theta {
        #[command(subcommand)]
        op: ThetaOp,
    },
    /// Shuffle algebra operations.
    Shuffle {
        #[command(subcommand)]
        op: ShuffleOp,
    },
    /// Character tables.
    Qchar {
        #[command(subcommand)]
        op: QcharOp,
    },
    /// Runs the acceptance criteria and the fixture checks.
    Battery(BatteryArgs),
}

#[derive(Subcommand)]
enum CartanOp {
    Validate {
        #[arg(long)]
        cartan: String,
    },
}

#[derive(Subcommand)]
enum CellsOp {
    Enumerate(CellsArgs),
}

#[derive(Args)]
struct CellsArgs {
    #[arg(long)]
    quiver: String,
    /// Dimension vector, one entry per vertex: "2" or "1,1".
    #[arg(long)]
    dim: String,
    /// Report the cell-count Poincare polynomial (coefficients of t^{2k}).
    #[arg(long)]
    poincare: bool,
    /// Use cell dimensions of the nilpotent locus.
    #[arg(long)]
    nilpotent: bool,
    /// List the collections.
    #[arg(long)]
    list: bool,
    #[arg(long, value_enum, default_value_t = OrderArg::LengthLex)]
    order: OrderArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    LengthLex,
    ReversedSlot,
}

impl From<OrderArg> for PathOrder {
    fn from(o: OrderArg) -> Self {
        match o {
            OrderArg::LengthLex => PathOrder::LengthLex,
            OrderArg::ReversedSlot => PathOrder::ReversedSlot,
        }
    }
}

#[derive(Subcommand)]
enum ThetaOp {
    Dim(ThetaArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Ordered,
    Intersected,
    PsiX,
}

#[derive(Args)]
struct ThetaArgs {
    #[arg(long, value_enum)]
    mode: Mode,
    #[arg(long)]
    quiver: Option<String>,
    #[arg(long)]
    dim: Option<String>,
    /// Vertex sequence for the ordered mode: "0,0,1" or names.
    #[arg(long)]
    ordering: Option<String>,
    #[arg(long)]
    cartan: Option<String>,
    #[arg(long)]
    psi: Option<String>,
    /// The point x as {"vertex": [s, ...]}.
    #[arg(long)]
    x: Option<String>,
    /// Monomial truncation window; must reach the certified bound.
    #[arg(long)]
    window: Option<usize>,
}

#[derive(Subcommand)]
enum ShuffleOp {
    Product {
        #[arg(long)]
        cartan: String,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    Wheels {
        #[arg(long)]
        cartan: String,
        #[arg(long)]
        poly: String,
        /// Only this ordered pair of vertices: "i,j".
        #[arg(long)]
        pair: Option<String>,
    },
}

#[derive(Subcommand)]
enum QcharOp {
    Table {
        #[arg(long)]
        cartan: String,
        #[arg(long)]
        psi: String,
        /// Padding of the s range around the zeros and poles of psi.
        #[arg(long, default_value_t = 2)]
        window: i64,
        #[arg(long, default_value_t = 3)]
        max_total: usize,
        /// Skip the twisted-route cross-check.
        #[arg(long)]
        no_check_routes: bool,
    },
}

#[derive(Args)]
struct BatteryArgs {
    /// Directory of fixture files replacing the bundled ones.
    #[arg(long)]
    fixtures: Option<PathBuf>,
    /// Criteria to run, e.g. "1,2,7" (default: all).
    #[arg(long)]
    only: Option<String>,
}

/// A JSON argument: inline when it starts with `{` or `[`, a file path otherwise.
fn read_json(arg: &str) -> anyhow::Result<Value> {
    let t = arg.trim_start();
    let text = if t.starts_with('{') || t.starts_with('[') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| Error::Parse(format!("{arg}: {e}")))?
    };
    Ok(serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{arg}: {e}")))?)
}

fn datum_file(arg: &str) -> anyhow::Result<DatumFile> {
    Ok(serde_json::from_value(read_json(arg)?).map_err(|e| Error::Parse(format!("{arg}: {e}")))?)
}

fn read_cartan(arg: &str) -> anyhow::Result<CartanDatum> {
    Ok(datum_file(arg)?.cartan()?)
}

fn read_quiver(arg: &str) -> anyhow::Result<Quiver> {
    Ok(datum_file(arg)?.quiver()?)
}

fn read_poly(arg: &str) -> anyhow::Result<LaurentPoly> {
    Ok(serde_json::from_value(read_json(arg)?).map_err(|e| Error::Parse(format!("{arg}: {e}")))?)
}

fn parse_dim(s: &str, quiver: &Quiver) -> anyhow::Result<Vec<usize>> {
    let n: Vec<usize> = s
        .split(',')
        .map(|t| t.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|e| Error::Parse(format!("dimension vector {s:?}: {e}")))?;
    if n.len() != quiver.num_vertices() {
        return Err(Error::Parse(format!(
            "dimension vector has {} entries for {} vertices",
            n.len(),
            quiver.num_vertices()
        ))
        .into());
    }
    Ok(n)
}

fn parse_ordering(s: &str, quiver: &Quiver) -> anyhow::Result<Vec<usize>> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            quiver
                .index_of(t)
                .or_else(|| t.parse::<usize>().ok().filter(|&i| i < quiver.num_vertices()))
                .ok_or_else(|| Error::Parse(format!("unknown vertex {t:?} in ordering")).into())
        })
        .collect()
}

fn window(cli: &Cli, w: Option<usize>) -> Window {
    match w {
        None => Window::Auto,
        Some(w) if cli.unsafe_window => Window::Unsafe(w),
        Some(w) => Window::Monomial(w),
    }
}

fn meta(command: &str, extra: Value) -> Value {
    let mut m = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "conventions": {
            "zeta": "zeta_ij(x) = q^{-d_ij} - x (i<j), (q^{-d_ii} - x)/(1 - x) (i=j), 1 - q^{-d_ij}/x (i>j), vertices in file order",
            "path_order": "length, origin vertex, framing slot, arrow ids",
            "symmetrization": "plain sum over color-preserving permutations",
            "scalars": "num/den coefficient lists in ascending powers of q",
            "laurent": "flat color-major variables with per-color counts dims",
        },
    });
    if let (Value::Object(m), Value::Object(e)) = (&mut m, extra) {
        m.extend(e);
    }
    m
}

fn with_meta(mut result: Value, meta: Value) -> Value {
    if let Value::Object(r) = &mut result {
        r.insert("meta".into(), meta);
    }
    result
}

/// Output document and exit status.
fn run(cli: &Cli) -> anyhow::Result<(Value, u8)> {
    let out = match &cli.command {
        Command::Cartan { op: CartanOp::Validate { cartan } } => {
            let d = read_cartan(cartan)?;
            let mut v = d.to_json();
            v["valid"] = json!(true);
            v["rank"] = json!(d.rank());
            with_meta(v, meta("cartan validate", json!({})))
        }
        Command::Cells { op: CellsOp::Enumerate(a) } => {
            let q = read_quiver(&a.quiver)?;
            let n = parse_dim(&a.dim, &q)?;
            let order = PathOrder::from(a.order);
            let cells = enumerate_acceptable(&q, &n, order);
            let hist = dimension_histogram(&cells, &q, order, a.nilpotent);
            let mut v = json!({
                "count": cells.len(),
                "dims_histogram": hist.iter().map(|(d, c)| (d.to_string(), json!(c))).collect::<serde_json::Map<_, _>>(),
            });
            if a.poincare {
                let top = hist.keys().next_back().copied().unwrap_or(0);
                let coeffs: Vec<usize> = (0..=top).map(|k| hist.get(&k).copied().unwrap_or(0)).collect();
                v["poincare"] = json!(if cells.is_empty() { vec![] } else { coeffs });
            }
            if a.list {
                let list: Vec<Vec<String>> =
                    cells.iter().map(|c| c.paths.iter().map(|p| p.display(&q)).collect()).collect();
                v["collections"] = json!(list);
            }
            let order_name = match a.order {
                OrderArg::LengthLex => "length-lex",
                OrderArg::ReversedSlot => "reversed-slot",
            };
            with_meta(v, meta("cells enumerate", json!({"order": order_name, "nilpotent": a.nilpotent, "n": n})))
        }
        Command::Theta { op: ThetaOp::Dim(a) } => theta_dim(cli, a)?,
        Command::Shuffle { op } => match op {
            ShuffleOp::Product { cartan, left, right } => {
                let d = read_cartan(cartan)?;
                let f = read_poly(left)?;
                let g = read_poly(right)?;
                let p = shuffle_product(&d, &f, &g)?;
                with_meta(json!({"product": p}), meta("shuffle product", json!({"order": d.names()})))
            }
            ShuffleOp::Wheels { cartan, poly, pair } => {
                let d = read_cartan(cartan)?;
                let f = read_poly(poly)?;
                let pairs: Vec<(usize, usize)> = match pair {
                    Some(s) => {
                        let v: Vec<&str> = s.split(',').collect();
                        if v.len() != 2 {
                            return Err(Error::Parse(format!("pair {s:?} is not i,j")).into());
                        }
                        vec![(d.resolve_vertex(&json!(v[0].trim()))?, d.resolve_vertex(&json!(v[1].trim()))?)]
                    }
                    None => {
                        (0..d.rank()).flat_map(|i| (0..d.rank()).map(move |j| (i, j))).filter(|(i, j)| i != j).collect()
                    }
                };
                let mut checks = Vec::new();
                let mut failed = false;
                for (i, j) in pairs {
                    let w = wheel_check_finite(&f, &d, i, j)?;
                    failed |= w == qshuffle::shuffle_mod::WheelOutcome::Fail;
                    checks.push(json!({"i": d.names()[i], "j": d.names()[j], "outcome": w}));
                }
                with_meta(
                    json!({"checks": checks, "passed": !failed}),
                    meta("shuffle wheels", json!({"order": d.names()})),
                )
            }
        },
        Command::Qchar { op: QcharOp::Table { cartan, psi, window: pad, max_total, no_check_routes } } => {
            let d = read_cartan(cartan)?;
            let psi = EllWeight::from_json(&d, &read_json(psi)?)?;
            let opts = CharacterOptions {
                max_total: *max_total,
                pad: *pad,
                window: Window::Auto,
                check_routes: !no_check_routes,
            };
            let t = assemble_character(&d, &psi, opts)?;
            let entries: Vec<Value> = t
                .entries
                .iter()
                .map(|e| {
                    let mut v = json!({"n": e.n, "x": e.x.to_json(&d), "dim": e.dim});
                    if let Some(c) = e.euler_cmp {
                        v["euler_cmp"] = json!(c);
                    }
                    if let Some(c) = e.twisted {
                        v["twisted"] = json!(c);
                    }
                    v
                })
                .collect();
            let total: usize = t.entries.iter().map(|e| e.dim).sum();
            with_meta(
                json!({"head": psi.to_json(&d), "entries": entries, "total": total}),
                meta(
                    "qchar table",
                    json!({
                        "order": d.names(),
                        "window": pad,
                        "s_range": [t.s_range.0, t.s_range.1],
                        "max_total": t.max_total,
                        "certified": t.certified,
                        "routes_checked": !no_check_routes,
                    }),
                ),
            )
        }
        Command::Battery(a) => return run_battery(cli, a),
    };
    Ok((out, 0))
}

fn theta_dim(cli: &Cli, a: &ThetaArgs) -> anyhow::Result<Value> {
    let need = |o: &Option<String>, name: &str| -> anyhow::Result<String> {
        o.clone().ok_or_else(|| Error::Parse(format!("--{name} is required for this mode")).into())
    };
    let w = window(cli, a.window);
    let (space, extra) = match a.mode {
        Mode::Ordered => {
            let q = read_quiver(&need(&a.quiver, "quiver")?)?;
            let o = parse_ordering(&need(&a.ordering, "ordering")?, &q)?;
            let s = theta_ordered(&q, &o, w)?;
            (s, json!({"mode": "ordered", "ordering": o, "tower_rank": tower_rank_product(&q, &o)}))
        }
        Mode::Intersected => {
            let q = read_quiver(&need(&a.quiver, "quiver")?)?;
            let n = parse_dim(&need(&a.dim, "dim")?, &q)?;
            (theta_intersected(&q, &n, w)?, json!({"mode": "intersected", "n": n}))
        }
        Mode::PsiX => {
            let d = read_cartan(&need(&a.cartan, "cartan")?)?;
            let psi = EllWeight::from_json(&d, &read_json(&need(&a.psi, "psi")?)?)?;
            let x = XPoint::from_json(&d, &read_json(&need(&a.x, "x")?)?)?;
            (theta_psi_x(&d, &x, &psi, w)?, json!({"mode": "psi-x", "x": x.to_json(&d)}))
        }
    };
    let s = space.summary();
    let v = json!({
        "corank": s.corank,
        "rank": s.rank,
        "window": s.window,
        "required_window": s.required_window,
        "certified": s.certified,
        "columns": s.columns,
        "frames": s.frames,
    });
    Ok(with_meta(v, meta("theta dim", extra)))
}

fn load_fixtures(dir: Option<&Path>) -> anyhow::Result<Vec<(String, anyhow::Result<Fixture>)>> {
    let parse = |name: &str, text: &str| -> anyhow::Result<Fixture> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("{name}: {e}")).into())
    };
    let Some(dir) = dir else {
        return Ok(BUNDLED_FIXTURES.iter().map(|(n, t)| (n.to_string(), parse(n, t))).collect());
    };
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    Ok(paths
        .iter()
        .map(|p| {
            let name = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let f = std::fs::read_to_string(p).map_err(anyhow::Error::from).and_then(|t| parse(&name, &t));
            (name, f)
        })
        .collect())
}

fn run_battery(cli: &Cli, a: &BatteryArgs) -> anyhow::Result<(Value, u8)> {
    let ids: Vec<u8> = match &a.only {
        None => CRITERIA.iter().map(|c| c.0).collect(),
        Some(s) => s
            .split(',')
            .map(|t| t.trim().parse::<u8>().ok().filter(|i| (1..=11).contains(i)))
            .collect::<Option<_>>()
            .ok_or_else(|| anyhow!(Error::Parse(format!("criteria list {s:?}"))))?,
    };
    let mut passed = true;
    let mut criteria = Vec::new();
    for id in ids {
        let r = battery::run_criterion(id, cli.seed);
        eprintln!("{}", r.line());
        passed &= r.passed && r.within_limit();
        criteria.push(r);
    }
    let mut fixtures = Vec::new();
    for (name, f) in load_fixtures(a.fixtures.as_deref())? {
        let r = match f {
            Ok(f) => battery::FixtureReport { name, ..check_fixture(&f) },
            Err(e) => battery::FixtureReport { name, passed: false, detail: format!("error: {e}") },
        };
        eprintln!("[{}] fixture {} {}", if r.passed { "pass" } else { "FAIL" }, r.name, r.detail);
        passed &= r.passed;
        fixtures.push(r);
    }
    let v = json!({"criteria": criteria, "fixtures": fixtures, "passed": passed});
    Ok((with_meta(v, meta("battery", json!({"seed": cli.seed}))), if passed { 0 } else { 3 }))
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if let Some(q) = e.downcast_ref::<Error>() {
        return match q {
            Error::Parse(_) => 1,
            Error::CrossCheck(_) => 3,
            _ => 2,
        };
    }
    if e.downcast_ref::<std::io::Error>().is_some() || e.downcast_ref::<serde_json::Error>().is_some() {
        return 1;
    }
    2
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match par::with_threads(cli.jobs, || run(&cli)) {
        Ok((doc, code)) => {
            let text = serde_json::to_string_pretty(&doc).expect("JSON values serialize") + "\n";
            let written = match &cli.output {
                Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e:#}");
                return ExitCode::from(1);
            }
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
