//! `ckp`: enumerations, characters, identity verification and Hirota scans from the command line.
//!
//! Exit codes: 0 when every check passes, 1 on a falsification, 2 on usage or configuration errors.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ckp_core::dressed::hwv_from_bipartition;
use ckp_core::half::{fmt_doubled, parse_doubled};
use ckp_core::hirota::{
    beta_gamma_equivalence, central_charge_probe, exp_orbit_tau, g_generator, hirota_residual, no_solution_scan,
    symmetry_check, QuadraticGenerator,
};
use ckp_core::hwv::{hwv_basis, is_hwv, Algebra};
use ckp_core::identities::{self, verify_all, verify_identity, VerifyOptions, REGISTRY};
use ckp_core::partitions::{crank_counts, enumerate_bpdi, enumerate_odp, enumerate_ptdo, hwv_count_via_crank};
use ckp_core::series::Series;
use ckp_core::{CkpError, FockVector, HalfOdd, Rational};

#[derive(Parser, Debug)]
#[command(name = "ckp", version, about = "Exact computations on the CKP Fock space")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Output file; defaults to stdout, or to a file in $CKP_OUTPUT_DIR when that is set.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Which {
    Fock,
    Hwv,
    Qt,
    Triple,
    Crank,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Family {
    Odp,
    Ptdo,
    Bpdi,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Basis of highest weight vectors at one degree.
    Hwv {
        #[arg(long)]
        algebra: Algebra,
        /// Degree as "5/2", "2.5" or "3".
        #[arg(long)]
        degree: String,
        /// Kept for compatibility; JSON is the default format.
        #[arg(long)]
        json: bool,
    },
    /// Character series in doubled-exponent JSON.
    Character {
        #[arg(long, value_enum)]
        which: Which,
        /// Doubled q-order N.
        #[arg(long, default_value_t = 20)]
        order: u32,
    },
    /// Runs one registry identity or all of them.
    Verify {
        #[arg(long, default_value = "all")]
        identity: String,
        /// Doubled q-order N.
        #[arg(long, default_value_t = 40)]
        order: u32,
        /// Order increase for the stability re-run; 0 skips it.
        #[arg(long, default_value_t = 8)]
        guard: u32,
    },
    /// Hirota operator checks; runs every check unless some are selected.
    Hirota {
        #[arg(long)]
        scan: bool,
        #[arg(long)]
        symmetry: bool,
        #[arg(long)]
        beta_gamma: bool,
        #[arg(long)]
        central_charge: bool,
        #[arg(long)]
        orbits: bool,
        /// Degree bound D as "3", "6" or "5/2".
        #[arg(long, default_value = "3")]
        max_degree: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Partition families up to a weight.
    Partitions {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        max_weight: String,
    },
    /// P_tdo and BP_DI counts and the per-charge table at one degree.
    Bijection {
        #[arg(long)]
        degree: String,
    },
}

/// Output rows for CSV and the JSON document for JSON.
struct Output {
    json: Value,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    pass: bool,
}

enum Failure {
    Usage(String),
    Falsified(String),
}

impl From<CkpError> for Failure {
    fn from(e: CkpError) -> Self {
        match e {
            CkpError::EvenDoubledIndex(_)
            | CkpError::ParseHalf(_)
            | CkpError::MalformedMonomial(_)
            | CkpError::MalformedPartition(_)
            | CkpError::UnknownIdentity(_)
            | CkpError::WindowTooSmall { .. }
            | CkpError::NotDegreeRaising(..) => Failure::Usage(e.to_string()),
            _ => Failure::Falsified(e.to_string()),
        }
    }
}

fn cols(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn doubled_arg(s: &str) -> Result<u32, Failure> {
    let d = parse_doubled(s)?;
    u32::try_from(d).map_err(|_| Failure::Usage(format!("degree must be nonnegative, got {s}")))
}

fn rational_json(c: &Rational) -> (Value, Value) {
    let f = |x: &num_bigint::BigInt| x.to_string().parse::<i64>().map(Value::from).unwrap_or_else(|_| Value::from(x.to_string()));
    (f(c.numer()), f(c.denom()))
}

/// [[[doubled index, multiplicity], …], num, den] per term.
fn vector_json(v: &FockVector) -> Value {
    Value::Array(
        v.terms()
            .map(|(m, c)| {
                let parts: Vec<Value> = m.parts().iter().map(|&(j, k)| json!([-(j as i64), k])).collect();
                let (n, d) = rational_json(c);
                json!([parts, n, d])
            })
            .collect(),
    )
}

fn series_output(s: &Series) -> Output {
    let vars = s.grading().vars.clone();
    let n = vars.len();
    let mut header: Vec<String> = vars.iter().map(|v| format!("{v}_doubled")).collect();
    header.extend(["num".to_string(), "den".to_string()]);
    let rows = s
        .sorted_terms()
        .iter()
        .map(|(e, c)| {
            let mut r: Vec<String> = e[..n].iter().map(|x| x.to_string()).collect();
            r.push(c.numer().to_string());
            r.push(c.denom().to_string());
            r
        })
        .collect();
    Output { json: s.to_json(), header, rows, pass: true }
}

fn run_hwv(algebra: Algebra, degree: &str) -> Result<Output, Failure> {
    let d2 = doubled_arg(degree)?;
    let basis = hwv_basis(algebra, d2);
    let mut vectors = Vec::new();
    let mut rows = Vec::new();
    for (i, v) in basis.vectors.iter().enumerate() {
        let charge = basis.charges.as_ref().map(|c| c[i]);
        vectors.push(json!({ "charge": charge, "vector": vector_json(v), "display": v.to_string() }));
        rows.push(vec![i.to_string(), charge.map(|c| c.to_string()).unwrap_or_default(), d2.to_string(), v.to_string()]);
    }
    let pass = basis.vectors.iter().all(|v| is_hwv(algebra, v));
    Ok(Output {
        json: json!({ "algebra": algebra, "degree": fmt_doubled(d2 as i64), "doubled_degree": d2, "vectors": vectors }),
        header: cols(&["index", "charge", "doubled_degree", "vector"]),
        rows,
        pass,
    })
}

fn run_character(which: Which, order: u32) -> Result<Output, Failure> {
    let s = match which {
        Which::Fock => identities::char_fock_bruteforce(order)?,
        Which::Hwv => identities::char_hwv(order)?,
        Which::Qt => identities::char_twisted_trace(order)?,
        Which::Triple => identities::char_triple(order)?,
        Which::Crank => identities::crank_series(order, &crank_counts(order / 2))?,
    };
    Ok(series_output(&s))
}

fn run_verify(identity: &str, order: u32, guard: u32) -> Result<Output, Failure> {
    let opts = VerifyOptions { order, guard };
    let reports = if identity == "all" {
        verify_all(opts)?
    } else if REGISTRY.contains(&identity) {
        vec![verify_identity(identity, opts)?]
    } else {
        return Err(Failure::Usage(format!("unknown identity {identity:?}; expected one of {} or all", REGISTRY.join(", "))));
    };
    let stable = |r: &identities::IdentityReport| r.stability.map(|(_, s)| s).unwrap_or(true);
    let pass = reports.iter().all(|r| r.pass && stable(r));
    let rows = reports
        .iter()
        .map(|r| {
            vec![
                r.name.clone(),
                r.order.to_string(),
                r.pass.to_string(),
                r.stability.map(|(o, s)| format!("{s}@{o}")).unwrap_or_default(),
                r.witness.as_ref().map(|w| format!("{}: {:?} {} vs {}", w.check, w.doubled_exponents, w.left, w.right)).unwrap_or_default(),
            ]
        })
        .collect();
    let summary: Vec<Value> =
        reports.iter().map(|r| json!({ "name": r.name, "pass": r.pass, "stable": stable(r) })).collect();
    Ok(Output {
        json: json!({ "order": order, "guard": guard, "pass": pass, "summary": summary, "reports": reports }),
        header: cols(&["identity", "order", "pass", "stability", "witness"]),
        rows,
        pass,
    })
}

struct HirotaChoice {
    scan: bool,
    symmetry: bool,
    beta_gamma: bool,
    central_charge: bool,
    orbits: bool,
}

fn run_hirota(choice: HirotaChoice, max_degree: &str, trials: usize, seed: u64) -> Result<Output, Failure> {
    let d2 = doubled_arg(max_degree)?;
    let all = !(choice.scan || choice.symmetry || choice.beta_gamma || choice.central_charge || choice.orbits);
    let mut doc = serde_json::Map::new();
    let mut rows = Vec::new();
    let mut pass = true;
    let mut record = |name: &str, ok: bool, detail: Value, rows: &mut Vec<Vec<String>>| {
        pass &= ok;
        rows.push(vec![name.to_string(), ok.to_string(), detail.to_string()]);
        doc.insert(name.to_string(), json!({ "pass": ok, "detail": detail }));
    };
    if all || choice.scan {
        let r = no_solution_scan(d2, trials, seed);
        record("scan", r.pass(), serde_json::to_value(&r).expect("plain data"), &mut rows);
    }
    if all || choice.symmetry {
        let indices: Vec<i32> = (-5..=5).filter(|k: &i32| k.rem_euclid(2) == 1).collect();
        let failures: Vec<String> = indices
            .iter()
            .flat_map(|&a| indices.iter().map(move |&b| (a, b)))
            .filter(|&(a, b)| !symmetry_check(HalfOdd::of(a), HalfOdd::of(b), d2))
            .map(|(a, b)| format!("({}, {})", fmt_doubled(a as i64), fmt_doubled(b as i64)))
            .collect();
        record("symmetry", failures.is_empty(), json!({ "pairs": indices.len().pow(2), "failures": failures }), &mut rows);
    }
    if all || choice.beta_gamma {
        let r = beta_gamma_equivalence(d2);
        record("beta_gamma", r.pass, serde_json::to_value(&r).expect("plain data"), &mut rows);
    }
    if all || choice.central_charge {
        let minus_half = Rational::new((-1).into(), 2.into());
        let plus_half = -minus_half.clone();
        let pairs = [((0, 1), (1, 0)), ((-1, 2), (2, -1)), ((0, 2), (2, 0)), ((1, 1), (0, 0)), ((0, 1), (0, 1))];
        let mut probes = Vec::new();
        let mut ok = true;
        for ((i, j), (k, l)) in pairs {
            let (x, y) = (g_generator(i, j), g_generator(k, l));
            let p = central_charge_probe(&x, &y, d2, &minus_half)?;
            let m = central_charge_probe(&x, &y, d2, &plus_half)?;
            let zero_cocycle = p.cocycle == "0";
            ok &= p.pass && (zero_cocycle || !m.pass);
            probes.push(json!({ "pair": [[i, j], [k, l]], "probe": p, "mutation_rejected": !m.pass }));
        }
        record("central_charge", ok, Value::Array(probes), &mut rows);
    }
    if all || choice.orbits {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut residual_terms = 0;
        for _ in 0..20 {
            let g = QuadraticGenerator::random(&mut rng, 2, 5);
            let tau = exp_orbit_tau(&g, d2)?;
            residual_terms += hirota_residual(&tau, d2).len();
        }
        record("orbits", residual_terms == 0, json!({ "generators": 20, "residual_terms": residual_terms }), &mut rows);
    }
    Ok(Output { json: Value::Object(doc), header: cols(&["check", "pass", "detail"]), rows, pass })
}

fn run_partitions(family: Family, max_weight: &str) -> Result<Output, Failure> {
    let w2 = doubled_arg(max_weight)?;
    let mut items: Vec<(u32, String, Option<i32>)> = Vec::new();
    match family {
        Family::Odp => {
            for (w, ps) in enumerate_odp(w2).iter().enumerate() {
                items.extend(ps.iter().map(|p| (w as u32, p.to_string(), None)));
            }
        }
        Family::Ptdo => {
            for (w, ps) in enumerate_ptdo(w2).iter().enumerate() {
                items.extend(ps.iter().map(|p| (w as u32, p.to_string(), None)));
            }
        }
        Family::Bpdi => items.extend(enumerate_bpdi(w2).iter().map(|b| (b.doubled_weight(), b.to_string(), Some(b.birank())))),
    }
    let json_items: Vec<Value> = items
        .iter()
        .map(|(w, p, b)| json!({ "weight": fmt_doubled(*w as i64), "doubled_weight": w, "partition": p, "birank": b }))
        .collect();
    let rows = items
        .iter()
        .map(|(w, p, b)| vec![w.to_string(), p.clone(), b.map(|x| x.to_string()).unwrap_or_default()])
        .collect();
    Ok(Output {
        json: json!({ "family": format!("{family:?}").to_lowercase(), "max_doubled_weight": w2, "partitions": json_items }),
        header: cols(&["doubled_weight", "partition", "birank"]),
        rows,
        pass: true,
    })
}

fn run_bijection(degree: &str) -> Result<Output, Failure> {
    let d2 = doubled_arg(degree)?;
    let ptdo = enumerate_ptdo(d2).pop().unwrap_or_default();
    let bps: Vec<_> = enumerate_bpdi(d2).into_iter().filter(|b| b.doubled_weight() == d2).collect();
    let basis = hwv_basis(Algebra::Untwisted, d2);
    let table = crank_counts(d2 / 2);
    let mut vectors = Vec::new();
    let mut ok = true;
    let mut by_charge: BTreeMap<i32, [i64; 3]> = BTreeMap::new();
    for bp in &bps {
        let v = hwv_from_bipartition(bp);
        let charge = v.homogeneous_charge();
        let fits = !v.is_zero()
            && v.homogeneous_doubled_degree() == Some(d2)
            && charge == Some(bp.birank())
            && is_hwv(Algebra::Untwisted, &v);
        ok &= fits;
        by_charge.entry(bp.birank()).or_default()[0] += 1;
        vectors.push(json!({ "bipartition": bp.to_string(), "charge": charge, "is_hwv": fits, "vector": vector_json(&v), "display": v.to_string() }));
    }
    for c in basis.charges.iter().flatten() {
        by_charge.entry(*c).or_default()[1] += 1;
    }
    let charges: Vec<i32> = by_charge.keys().copied().collect();
    for c in charges {
        by_charge.entry(c).or_default()[2] = hwv_count_via_crank(&table, d2, c as i64);
    }
    ok &= ptdo.len() == bps.len() && bps.len() == basis.len();
    ok &= by_charge.values().all(|[a, b, c]| a == b && b == c);
    let mut multiset: Vec<i32> = bps.iter().map(|b| b.birank()).collect();
    multiset.sort_unstable_by(|a, b| b.cmp(a));
    let table_json: Vec<Value> =
        by_charge.iter().rev().map(|(c, [a, b, k])| json!({ "charge": c, "bpdi": a, "solver": b, "crank": k })).collect();
    let rows = by_charge.iter().rev().map(|(c, [a, b, k])| vec![c.to_string(), a.to_string(), b.to_string(), k.to_string()]).collect();
    Ok(Output {
        json: json!({
            "degree": fmt_doubled(d2 as i64),
            "doubled_degree": d2,
            "ptdo_count": ptdo.len(),
            "bpdi_count": bps.len(),
            "solver_count": basis.len(),
            "charge_multiset": multiset,
            "charge_table": table_json,
            "vectors": vectors,
        }),
        header: cols(&["charge", "bpdi", "solver", "crank"]),
        rows,
        pass: ok,
    })
}

fn default_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Hwv { .. } => "hwv",
        Command::Character { .. } => "character",
        Command::Verify { .. } => "verify",
        Command::Hirota { .. } => "hirota",
        Command::Partitions { .. } => "partitions",
        Command::Bijection { .. } => "bijection",
    }
}

fn render(out: &Output, format: Format) -> Result<Vec<u8>, Failure> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&out.json).map_err(|e| Failure::Usage(e.to_string()))?;
            s.push('\n');
            Ok(s.into_bytes())
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&out.header).map_err(|e| Failure::Usage(e.to_string()))?;
            for r in &out.rows {
                w.write_record(r).map_err(|e| Failure::Usage(e.to_string()))?;
            }
            w.into_inner().map_err(|e| Failure::Usage(e.to_string()))
        }
    }
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let out = match &cli.command {
        Command::Hwv { algebra, degree, .. } => run_hwv(*algebra, degree)?,
        Command::Character { which, order } => run_character(*which, *order)?,
        Command::Verify { identity, order, guard } => run_verify(identity, *order, *guard)?,
        Command::Hirota { scan, symmetry, beta_gamma, central_charge, orbits, max_degree, trials, seed } => run_hirota(
            HirotaChoice {
                scan: *scan,
                symmetry: *symmetry,
                beta_gamma: *beta_gamma,
                central_charge: *central_charge,
                orbits: *orbits,
            },
            max_degree,
            *trials,
            *seed,
        )?,
        Command::Partitions { family, max_weight } => run_partitions(*family, max_weight)?,
        Command::Bijection { degree } => run_bijection(degree)?,
    };
    let bytes = render(&out, cli.format)?;
    let ext = match cli.format {
        Format::Json => "json",
        Format::Csv => "csv",
    };
    let path = cli.output.clone().or_else(|| {
        std::env::var_os("CKP_OUTPUT_DIR").map(|d| PathBuf::from(d).join(format!("{}.{ext}", default_name(&cli.command))))
    });
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| Failure::Usage(format!("{}: {e}", dir.display())))?;
            }
            std::fs::write(&p, &bytes).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
            println!("{} {}", if out.pass { "pass" } else { "FAIL" }, p.display());
        }
        None => std::io::stdout().write_all(&bytes).map_err(|e| Failure::Usage(e.to_string()))?,
    }
    Ok(out.pass)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Falsified(m)) => {
            println!("{}", json!({ "pass": false, "error": m }));
            ExitCode::from(1)
        }
    }
}
