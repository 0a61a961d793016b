//! `entroq` — certify the sharp entropy inequality, enclose its best
//! constant, and stress the associated union-closed frequency bound.
//!
//! Exit codes: 0 success (verified / satisfied / converged), 1 a genuine
//! counterexample or certified violation, 2 inconclusive (width-limited or
//! not fully certified), 3 usage, domain, or I/O errors.

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use entroq::{
    certify, closure_stats, exhaustive_check, random_probe, scan, solve_alpha, CertifyOptions,
    Exponent, Overall, RegionStatusKind, SetFamily, SolveStatus, VerificationReport, DEFAULT_TOL,
};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "entroq", version, about = "Certified checks for a sharp binary-entropy inequality", long_about = None)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Enclose the best constant alpha_k (root of x (1+x)^(k-1) = 1)
    Alpha(AlphaArgs),
    /// Certify alpha_k h(x^k) >= x^(k-1) h(x) on [0, 1] by branch and bound
    Verify(VerifyArgs),
    /// Tabulate q, the defect, and the U-residual on a uniform grid (CSV)
    Scan(ScanArgs),
    /// Union-closed set-family checks for the frequency corollary
    #[command(subcommand)]
    Ucs(UcsCmd),
}

#[derive(Args)]
struct AlphaArgs {
    /// Exponent k (> 1)
    #[arg(long)]
    k: f64,
    /// Target enclosure width
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Emit the certificate as JSON
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Exponent k (> 1)
    #[arg(long)]
    k: f64,
    /// Endpoint-zone half-width and equality-zone padding
    #[arg(long, default_value_t = 1e-3)]
    exclusion: f64,
    /// Maximum bisection depth per core region
    #[arg(long, default_value_t = 40)]
    depth: u32,
    /// Solver tolerance for alpha and the equality point
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Worker threads (output is identical for any count)
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Emit the full report as JSON
    #[arg(long)]
    json: bool,
    /// Test hook: subtract this constant from every defect evaluation
    #[arg(long, hide = true, default_value_t = 0.0, allow_hyphen_values = true)]
    defect_shift: f64,
}

#[derive(Args)]
struct ScanArgs {
    /// Exponent k (> 1)
    #[arg(long)]
    k: f64,
    /// Number of uniform grid points (including both endpoints)
    #[arg(long, default_value_t = 1001)]
    grid: u32,
    /// Write the CSV here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum UcsCmd {
    /// Closure fraction and frequency bound for one family from a file
    Check(UcsCheckArgs),
    /// Sweep every family on [n] (n <= 4)
    Exhaustive(UcsExhaustiveArgs),
    /// Seeded random families on [n] (n <= 16)
    Probe(UcsProbeArgs),
}

#[derive(Args)]
struct UcsCheckArgs {
    /// Family file: first line n, then one subset per line ("1,3"; "∅")
    #[arg(long)]
    family: PathBuf,
    /// Tuple length k (integer >= 2)
    #[arg(long)]
    k: u32,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct UcsExhaustiveArgs {
    /// Ground-set size (1..=4)
    #[arg(long)]
    n: u8,
    /// Tuple length k (integer >= 2)
    #[arg(long)]
    k: u32,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct UcsProbeArgs {
    /// Ground-set size (1..=16)
    #[arg(long)]
    n: u8,
    /// Tuple length k (integer >= 2)
    #[arg(long)]
    k: u32,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help/--version land here with successful "error" kinds
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> entroq::Result<u8> {
    match cli.cmd {
        Cmd::Alpha(a) => run_alpha(a),
        Cmd::Verify(a) => run_verify(a),
        Cmd::Scan(a) => run_scan(a),
        Cmd::Ucs(UcsCmd::Check(a)) => run_ucs_check(a),
        Cmd::Ucs(UcsCmd::Exhaustive(a)) => run_ucs_exhaustive(a),
        Cmd::Ucs(UcsCmd::Probe(a)) => run_ucs_probe(a),
    }
}

fn print_json<T: serde::Serialize>(value: &T) {
    // serialization of these report types cannot fail
    println!("{}", serde_json::to_string(value).expect("serializable report"));
}

fn run_alpha(a: AlphaArgs) -> entroq::Result<u8> {
    let k = Exponent::new(a.k)?;
    let cert = solve_alpha(k, a.tol)?;
    if a.json {
        print_json(&cert);
    } else {
        println!("k           {}", a.k);
        println!("alpha       {}", cert.enclosure);
        println!("width       {:.16e}", cert.width);
        println!("iterations  {}", cert.iterations);
        println!(
            "status      {}",
            match cert.status {
                SolveStatus::Converged => "converged",
                SolveStatus::WidthLimited => "width_limited",
            }
        );
    }
    Ok(match cert.status {
        SolveStatus::Converged => 0,
        SolveStatus::WidthLimited => 2,
    })
}

fn print_verify_human(r: &VerificationReport) {
    println!("k                 {}", r.k);
    println!(
        "alpha             [{:.16e}, {:.16e}]",
        r.alpha.lo, r.alpha.hi
    );
    println!("exclusion radius  {:.16e}", r.exclusion_radius);
    println!("overall           {}", r.overall.as_str());
    match r.min_certified_margin {
        Some(m) => println!("min margin        {:.16e}", m),
        None => println!("min margin        n/a"),
    }
    let count = |kind: RegionStatusKind| r.regions.iter().filter(|s| s.status == kind).count();
    println!(
        "regions           {} certified_positive, {} endpoint_zone, {} equality_zone, {} failed, {} inconclusive",
        count(RegionStatusKind::CertifiedPositive),
        count(RegionStatusKind::EndpointZone),
        count(RegionStatusKind::EqualityZone),
        count(RegionStatusKind::Failed),
        count(RegionStatusKind::Inconclusive),
    );
    for s in &r.regions {
        if matches!(s.status, RegionStatusKind::Failed | RegionStatusKind::Inconclusive) {
            println!(
                "  {}  [{:.16e}, {:.16e}]  margin {:.16e}",
                s.status.as_str(),
                s.lo,
                s.hi,
                s.margin
            );
        }
    }
}

fn run_verify(a: VerifyArgs) -> entroq::Result<u8> {
    let k = Exponent::new(a.k)?;
    let opts = CertifyOptions {
        exclusion_radius: a.exclusion,
        max_depth: a.depth,
        tol: a.tol,
        workers: a.workers,
        defect_shift: a.defect_shift,
        ..CertifyOptions::default()
    };
    let report = certify(k, &opts)?;
    if a.json {
        print_json(&report);
    } else {
        print_verify_human(&report);
    }
    Ok(match report.overall {
        Overall::Certified | Overall::CertifiedExceptZones => 0,
        Overall::Falsified => 1,
        Overall::Inconclusive => 2,
    })
}

fn run_scan(a: ScanArgs) -> entroq::Result<u8> {
    let k = Exponent::new(a.k)?;
    let rows = scan(k, a.grid)?;
    let mut csv = String::with_capacity(rows.len() * 96 + 32);
    csv.push_str("x,q,D,u_residual\n");
    for r in &rows {
        csv.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e}\n",
            r.x, r.q, r.d, r.u_residual
        ));
    }
    match a.out {
        Some(path) => {
            std::fs::write(&path, csv).map_err(|e| {
                entroq::Error::FamilyInvalid(format!("cannot write {}: {e}", path.display()))
            })?;
        }
        None => {
            // one write: the table can be large and stdout may be a pipe
            std::io::stdout()
                .write_all(csv.as_bytes())
                .map_err(|e| entroq::Error::FamilyInvalid(format!("cannot write stdout: {e}")))?;
        }
    }
    Ok(0)
}

fn read_family(path: &PathBuf) -> entroq::Result<SetFamily> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        entroq::Error::FamilyInvalid(format!("cannot read {}: {e}", path.display()))
    })?;
    SetFamily::from_text(&text)
}

fn run_ucs_check(a: UcsCheckArgs) -> entroq::Result<u8> {
    let family = read_family(&a.family)?;
    let cert = solve_alpha(Exponent::new(a.k as f64)?, DEFAULT_TOL)?;
    let stats = closure_stats(&family, a.k, &cert)?;
    if a.json {
        print_json(&stats);
    } else {
        println!(
            "family        {} members over [{}]",
            family.len(),
            family.n()
        );
        println!("union-closed  {}", family.is_union_closed());
        println!("k             {}", stats.k);
        println!("c             {:.16e}", stats.c);
        println!("epsilon       {:.16e}", stats.epsilon);
        println!(
            "max freq      {}/{} (element {})",
            stats.max_freq.count, stats.max_freq.of, stats.max_freq_element
        );
        match stats.bound {
            Some(b) => println!("bound         {:.16e}", b),
            None => println!("bound         n/a (epsilon >= 1/2)"),
        }
        println!("satisfied     {}", stats.satisfied);
    }
    Ok(if stats.satisfied { 0 } else { 1 })
}

fn run_ucs_exhaustive(a: UcsExhaustiveArgs) -> entroq::Result<u8> {
    let report = exhaustive_check(a.n, a.k, a.workers)?;
    let violations = report.violations.len();
    if a.json {
        print_json(&report);
    } else {
        println!("n                 {}", report.n);
        println!("k                 {}", report.k);
        println!("families checked  {}", report.families_checked);
        println!("families skipped  {}", report.families_skipped);
        println!("violations        {violations}");
        match report.min_slack {
            Some(s) => println!("min slack         {:.16e}", s),
            None => println!("min slack         n/a"),
        }
        for v in &report.violations {
            println!(
                "  encoding {:#x}: max_freq {:.16e} < bound {:.16e}",
                v.encoding, v.max_freq, v.bound
            );
        }
    }
    Ok(if violations == 0 { 0 } else { 1 })
}

fn run_ucs_probe(a: UcsProbeArgs) -> entroq::Result<u8> {
    let report = random_probe(a.n, a.k, a.trials, a.seed, a.workers)?;
    let violations = report.violations.len();
    if a.json {
        print_json(&report);
    } else {
        println!("n           {}", report.n);
        println!("k           {}", report.k);
        println!("trials      {}", report.trials);
        println!("seed        {}", report.seed);
        println!("skipped     {}", report.families_skipped);
        println!("violations  {violations}");
        match report.min_slack {
            Some(s) => println!("min slack   {:.16e}", s),
            None => println!("min slack   n/a"),
        }
        for v in &report.violations {
            println!(
                "  trial {}: members {:?}, max_freq {:.16e} < bound {:.16e}",
                v.trial, v.members, v.max_freq, v.bound
            );
        }
    }
    Ok(if violations == 0 { 0 } else { 1 })
}
