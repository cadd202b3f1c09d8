use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use spinexp::bounds::{self, MTable};
use spinexp::groupring::{self, GroupRingElement};
use spinexp::oracle::{self, Grid, TauResult};
use spinexp::report::render_table;
use spinexp::suite::{self, SuiteConfig};
use spinexp::weyl;
use spinexp::{Error, Family, GroupType, VerificationReport, Weight};

#[derive(Parser)]
#[command(name = "spinexp", version, about = "Exact computations for Spin(2n+1) and Spin(2n)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// List the Weyl orbit of a fundamental weight (k = n gives the full spin orbit).
    Orbit {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Only the half-orbit with an even number of minus signs.
        #[arg(long)]
        half: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the degree-i component of the characteristic map.
    Phi {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        i: usize,
        /// Omega coordinates, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        weight: String,
        /// Apply to the orbit sum rho(weight) instead of e^weight.
        #[arg(long)]
        orbit_sum: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the identity checks; exit status 1 if any fails.
    Verify {
        #[arg(long)]
        family: Option<Family>,
        /// Rank or inclusive range `a..b`.
        #[arg(long)]
        n: Option<String>,
        /// `all` or a comma-separated list of check ids.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = spinexp::identities::DEFAULT_SEED)]
        seed: u64,
        /// Random trials per randomized clause.
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Record wall-clock times (output is then not reproducible).
        #[arg(long)]
        timings: bool,
    },
    /// Compute the exponent tau_i with the lattice oracle.
    Tau {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        n: usize,
        /// Degree or inclusive range `a..b`.
        #[arg(long)]
        i: String,
        /// Grid schedule `box:level,box:level,...`; defaults to i:i up to i+3:i+3.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        timings: bool,
    },
    /// Tabulate the torsion bounds g(i) and t(i).
    Bounds {
        #[arg(long, default_value_t = 4)]
        imax: usize,
        /// Override or supply m(i), e.g. `--m 5=2`.
        #[arg(long = "m")]
        m: Vec<String>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

type CliResult = std::result::Result<(String, bool), Error>;

fn parse_range(s: &str) -> Result<(usize, usize), Error> {
    let bad = || Error::Parse(format!("expected an integer or a range a..b, got {s:?}"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().trim_start_matches('=').parse().map_err(|_| bad())?),
        None => {
            let v = s.trim().parse().map_err(|_| bad())?;
            (v, v)
        }
    };
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

fn parse_weight(s: &str) -> Result<Weight, Error> {
    s.split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad weight entry {t:?}"))))
        .collect::<Result<Vec<_>, _>>()
        .map(Weight::new)
}

fn parse_grid(s: &str) -> Result<Vec<Grid>, Error> {
    s.split(',')
        .map(|part| {
            let (b, l) = part.split_once(':').ok_or_else(|| Error::Parse(format!("grid entry {part:?} is not box:level")))?;
            let num = |x: &str| x.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad grid entry {part:?}")));
            Ok(Grid::new(num(b)?, num(l)?))
        })
        .collect()
}

fn warn_large(n: usize, i: usize) {
    if n > 6 || i > 6 {
        eprintln!("warning: n = {n}, i = {i} is beyond the tested range; this may take a long time");
    }
}

fn json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn csv_rows(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String, Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| Error::Parse(e.to_string()))?;
    for r in rows {
        w.write_record(&r).map_err(|e| Error::Parse(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("utf8"))
}

fn cmd_orbit(family: Family, n: usize, k: usize, half: bool, format: Format) -> CliResult {
    let g = GroupType::new(family, n)?;
    warn_large(n, 0);
    let orbit = if half { weyl::half_orbit_plus(&g, k)? } else { weyl::fundamental_orbit(&g, k)? };
    let out = match format {
        Format::Json => json(&orbit.records(&g)),
        Format::Csv => csv_rows(
            &["omega", "e"],
            orbit.weights().iter().map(|w| vec![join(w.omega()), join(&g.to_e_coords(w))]),
        )?,
        Format::Text => {
            let mut s = format!("# {g}: orbit of omega_{k}, {} weights\n", orbit.len());
            for w in orbit.weights() {
                s.push_str(&format!("omega=({})  e=({})\n", join(w.omega()), join(&g.to_e_coords(w))));
            }
            s
        }
    };
    Ok((out, true))
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn cmd_phi(family: Family, n: usize, i: usize, weight: &str, orbit_sum: bool, format: Format) -> CliResult {
    let g = GroupType::new(family, n)?;
    warn_large(n, i);
    let w = parse_weight(weight)?;
    g.check(&w)?;
    let x = if orbit_sum { groupring::rho(&g, &w)? } else { GroupRingElement::monomial(&g, w.clone(), BigInt::from(1)) };
    let p = groupring::phi(&x, i);
    let out = match format {
        Format::Json => json(&serde_json::json!({
            "weight": g.record(&w),
            "i": i,
            "orbit_sum": orbit_sum,
            "basis": "e",
            "terms": p.term_records(),
        })),
        Format::Csv => csv_rows(
            &["exps", "num", "den"],
            p.term_records().into_iter().map(|t| vec![join(&t.exps), t.num, t.den]),
        )?,
        Format::Text => format!("{p}\n"),
    };
    Ok((out, true))
}

fn verify_config(family: Option<Family>, n: Option<&str>, suite_sel: &str, seed: u64, trials: usize) -> Result<SuiteConfig, Error> {
    let groups: Vec<GroupType> = match n {
        None => suite::default_groups().into_iter().filter(|g| family.is_none_or(|f| g.family() == f)).collect(),
        Some(r) => {
            let (a, b) = parse_range(r)?;
            warn_large(b, 0);
            let fams = family.map(|f| vec![f]).unwrap_or_else(|| vec![Family::B, Family::D]);
            let mut gs = Vec::new();
            for f in fams {
                for n in a..=b {
                    gs.push(GroupType::new(f, n)?);
                }
            }
            gs
        }
    };
    let ids = match suite_sel.trim() {
        "all" => None,
        list => Some(list.split(',').map(|s| s.trim().to_string()).collect()),
    };
    let cfg = SuiteConfig { groups, ids, seed, trials };
    cfg.validate()?;
    Ok(cfg)
}

fn render_reports(reports: &[VerificationReport], format: Format) -> Result<String, Error> {
    Ok(match format {
        Format::Json => json(&reports),
        Format::Csv => csv_rows(
            &["id", "status", "witness_terms", "seed", "params", "notes"],
            reports.iter().map(|r| {
                vec![
                    r.id.clone(),
                    r.status.to_string(),
                    r.witness.len().to_string(),
                    r.seed.map(|s| s.to_string()).unwrap_or_default(),
                    serde_json::to_string(&r.params).expect("serializable"),
                    r.notes.join("; "),
                ]
            }),
        )?,
        Format::Text => {
            let pass = reports.iter().filter(|r| r.passed()).count();
            format!("{}{pass}/{} passed\n", render_table(reports), reports.len())
        }
    })
}

fn cmd_verify(cfg: &SuiteConfig, format: Format, timings: bool) -> CliResult {
    let mut reports = suite::run_suite(cfg)?;
    if !timings {
        for r in &mut reports {
            r.millis = None;
        }
    }
    let ok = reports.iter().all(|r| r.passed());
    Ok((render_reports(&reports, format)?, ok))
}

fn cmd_tau(family: Family, n: usize, i: &str, grid: Option<&str>, format: Format, timings: bool) -> CliResult {
    let g = GroupType::new(family, n)?;
    let (a, b) = parse_range(i)?;
    warn_large(n, b);
    let schedule = grid.map(parse_grid).transpose()?;
    let mut results: Vec<TauResult> = Vec::new();
    for i in a..=b {
        let sched = schedule.clone().unwrap_or_else(|| Grid::default_schedule(i));
        let mut r = oracle::tau(&g, i, &sched)?;
        if !timings {
            r.millis = None;
        }
        results.push(r);
    }
    let ok = results.iter().all(|r| r.stabilized && r.membership_verified);
    let out = match format {
        Format::Json => json(&results),
        Format::Csv => csv_rows(
            &["family", "n", "i", "tau", "stabilized", "divides_two", "notes"],
            results.iter().map(|r| {
                vec![
                    r.family.to_string(),
                    r.n.to_string(),
                    r.i.to_string(),
                    r.tau.clone(),
                    r.stabilized.to_string(),
                    r.divides_two.map(|d| d.to_string()).unwrap_or_default(),
                    r.notes.join("; "),
                ]
            }),
        )?,
        Format::Text => results
            .iter()
            .map(|r| {
                let mut s = format!("{g} i={}: tau={} stabilized={} grids={}\n", r.i, r.tau, r.stabilized, r.grid.len());
                for n in &r.notes {
                    s.push_str(&format!("  note: {n}\n"));
                }
                s
            })
            .collect(),
    };
    Ok((out, ok))
}

fn cmd_bounds(imax: usize, overrides: &[String], format: Format) -> CliResult {
    let mut table = MTable::published();
    for o in overrides {
        let (i, m) = MTable::parse_override(o)?;
        table.set(i, m);
    }
    if imax < 3 {
        return Err(Error::Precondition("--imax must be at least 3".into()));
    }
    let rows = bounds::bounds_table(imax, &table);
    let out = match format {
        Format::Json => {
            let mut s = bounds::to_json(&rows);
            s.push('\n');
            s
        }
        Format::Csv => bounds::to_csv(&rows)?,
        Format::Text => rows.iter().map(|r| format!("i={} m={} g={} t={}\n", r.i, r.m.map(|m| m.to_string()).unwrap_or_else(|| "?".into()), r.g, r.t)).collect(),
    };
    Ok((out, true))
}

fn run(cli: Cli) -> (CliResult, Option<PathBuf>) {
    match cli.command {
        Command::Orbit { family, n, k, half, format, out } => (cmd_orbit(family, n, k, half, format), out),
        Command::Phi { family, n, i, weight, orbit_sum, format, out } => (cmd_phi(family, n, i, &weight, orbit_sum, format), out),
        Command::Verify { family, n, suite, seed, trials, format, out, timings } => {
            let res = verify_config(family, n.as_deref(), &suite, seed, trials).and_then(|cfg| cmd_verify(&cfg, format, timings));
            (res, out)
        }
        Command::Tau { family, n, i, grid, format, out, timings } => (cmd_tau(family, n, &i, grid.as_deref(), format, timings), out),
        Command::Bounds { imax, m, format, out } => (cmd_bounds(imax, &m, format), out),
    }
}

fn init_threads() {
    if let Some(t) = std::env::var("EXPONENT_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if t > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
        }
    }
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
    init_threads();
    let (res, out) = run(cli);
    match res {
        Ok((text, ok)) => {
            match out {
                Some(path) => {
                    if let Err(e) = fs::write(&path, &text) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::from(if ok { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
