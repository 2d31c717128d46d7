//! Command-line surface: argument parsing, result documents and their
//! JSON and CSV renderings.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::ser::Serialize;
use serde::{Deserialize, Serialize as SerializeDerive};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::coeffs::{coeffs_from_c, constants_ln, SurfaceSpec};
use crate::error::{Error, Result};
use crate::geometry::{
    bando_futaki, chern_identity_residual, class_integrals, cone_check, rescale, ClassIntegrals, ConeVerdict,
    FutakiReport, Rescaled,
};
use crate::ivp::{integrate, Status};
use crate::profile::{ode_residual, recover_phi, ProfileSolution, SSample};
use crate::shoot::{
    find_m_with, phase_curve, scan_c, shoot_residuals, solve_bvp_with, PhaseRow, ScanOutcome, ScanRow,
    ShootResiduals, SolveOptions, Threshold,
};

/// Stored and recomputed values must agree to this, relative to `max(1, |x|)`.
pub const VERIFY_TOL: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(name = "hextremal", version, about = "Higher extremal Kähler profiles on pseudo-Hirzebruch surfaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the boundary-value problem and recover the profile.
    Solve {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        class: ClassArgs,
    },
    /// Integrate across a range of shooting constants.
    Scan {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long, default_value_t = -10.0, allow_negative_numbers = true)]
        c_min: f64,
        #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
        c_max: f64,
        #[arg(long, default_value_t = 25)]
        steps: usize,
    },
    /// Locate the existence threshold M.
    Mstar {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        class: ClassArgs,
    },
    /// Tabulate C* and M over several ratios.
    Phase {
        #[command(flatten)]
        common: Common,
        /// Comma separated ratios.
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        ms: Vec<f64>,
    },
    /// Re-solve a stored solve document and compare residuals.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Reduced Bando–Futaki obstruction of the solution.
    Futaki {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        class: ClassArgs,
    },
    /// Kähler cone membership of a·C + b·S.
    Cone {
        #[arg(long, default_value_t = 2)]
        genus: u32,
        #[arg(long, default_value_t = -1, allow_negative_numbers = true)]
        degree: i32,
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, allow_negative_numbers = true)]
        b: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    #[arg(long, default_value_t = 2)]
    pub genus: u32,
    #[arg(long, default_value_t = -1, allow_negative_numbers = true)]
    pub degree: i32,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 512)]
    pub grid: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ClassArgs {
    /// Ratio m in the class 2π(C + m S).
    #[arg(long, allow_negative_numbers = true)]
    pub m: Option<f64>,
    /// Fibre coefficient; use together with --b instead of --m.
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, SerializeDerive, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// The configuration echoed into every document.
#[derive(Debug, Clone, PartialEq, SerializeDerive, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunConfig {
    pub command: String,
    pub genus: u32,
    pub degree: i32,
    pub m: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub tol: f64,
    pub grid: usize,
    pub format: Format,
}

impl RunConfig {
    fn new(command: &str, common: &Common, class: Option<&ClassArgs>) -> Self {
        Self {
            command: command.into(),
            genus: common.genus,
            degree: common.degree,
            m: class.and_then(|c| c.m),
            a: class.and_then(|c| c.a),
            b: class.and_then(|c| c.b),
            tol: common.tol,
            grid: common.grid,
            format: common.format,
        }
    }

    pub fn options(&self) -> SolveOptions {
        SolveOptions { tol: self.tol, grid: self.grid }
    }

    /// The surface named by `--m` or by `--a` and `--b`.
    pub fn spec(&self) -> Result<SurfaceSpec> {
        match (self.m, self.a, self.b) {
            (Some(m), None, None) => SurfaceSpec::normalized(self.genus, self.degree, m),
            (None, Some(a), Some(b)) => SurfaceSpec::new(self.genus, self.degree, a, b),
            (None, None, None) => Err(Error::InvalidInput("one of --m or --a/--b is required".into())),
            _ => Err(Error::InvalidInput("give either --m or both --a and --b".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, SerializeDerive, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IvpInfo {
    pub tol: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub breakdown_floor: f64,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, SerializeDerive, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BoundaryInfo {
    pub phi_left: f64,
    pub phi_right: f64,
    pub phi_prime_left: f64,
    pub phi_prime_right: f64,
    pub ode_residual: f64,
    pub chern_residual: f64,
}

#[derive(Debug, Clone, PartialEq, SerializeDerive, Deserialize)]
pub struct ProfileColumns {
    pub gamma: Vec<f64>,
    pub v: Vec<f64>,
    pub phi: Vec<f64>,
    pub lambda: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, SerializeDerive, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SolutionInfo {
    #[serde(rename = "Cstar")]
    pub c_star: f64,
    /// `-N/L`.
    pub c_lower_bound: f64,
    #[serde(rename = "A")]
    pub slope: f64,
    #[serde(rename = "B")]
    pub intercept: f64,
    pub gamma0: f64,
    pub iterations: usize,
    pub bracket: [f64; 2],
    pub residuals: ShootResiduals,
    pub ivp: IvpInfo,
    pub boundary: BoundaryInfo,
    pub class_integrals: ClassIntegrals,
    pub futaki: FutakiReport,
    pub profile: ProfileColumns,
    pub s_samples: Vec<SSample>,
}

#[derive(Debug, Clone, PartialEq, SerializeDerive, Deserialize)]
pub struct SolveDoc {
    pub config: RunConfig,
    pub spec: SurfaceSpec,
    pub solution: SolutionInfo,
}

#[derive(Debug, Clone, PartialEq, SerializeDerive)]
pub struct ScanDoc {
    pub config: RunConfig,
    pub spec: SurfaceSpec,
    pub rows: Vec<ScanRow>,
}

#[derive(Debug, Clone, PartialEq, SerializeDerive)]
pub struct MstarDoc {
    pub config: RunConfig,
    pub spec: SurfaceSpec,
    pub threshold: Threshold,
}

#[derive(Debug, Clone, PartialEq, SerializeDerive)]
pub struct PhaseDoc {
    pub config: RunConfig,
    pub ms: Vec<f64>,
    pub rows: Vec<PhaseRow>,
}

#[derive(Debug, Clone, PartialEq, SerializeDerive)]
#[serde(rename_all = "camelCase")]
pub struct FutakiDoc {
    pub config: RunConfig,
    pub spec: SurfaceSpec,
    #[serde(rename = "Cstar")]
    pub c_star: f64,
    pub futaki: FutakiReport,
    pub rescaled: Rescaled,
}

#[derive(Debug, Clone, PartialEq, SerializeDerive)]
pub struct ConeDoc {
    pub verdict: ConeVerdict,
}

#[derive(Debug, Clone, PartialEq, SerializeDerive)]
pub struct VerifyCheck {
    pub name: String,
    pub stored: f64,
    pub recomputed: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, SerializeDerive)]
#[serde(rename_all = "camelCase")]
pub struct VerifyReport {
    pub passed: bool,
    pub within_tolerance: bool,
    pub checks: Vec<VerifyCheck>,
}

/// One rendered result.
#[derive(Debug, Clone, PartialEq)]
pub enum Document {
    Solve(Box<SolveDoc>),
    Scan(ScanDoc),
    Mstar(MstarDoc),
    Phase(PhaseDoc),
    Verify(VerifyReport),
    Futaki(FutakiDoc),
    Cone(ConeDoc),
}

/// What a command produced, ready to be written.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub document: Document,
    pub format: Format,
    pub output: Option<PathBuf>,
}

impl Outcome {
    /// Exit status for a successful run: 1 when a verification failed.
    pub fn exit_code(&self) -> i32 {
        match &self.document {
            Document::Verify(r) if !r.passed => 1,
            _ => 0,
        }
    }

    pub fn render(&self) -> Result<String> {
        match self.format {
            Format::Json => Ok(self.document.to_json()),
            Format::Csv => self.document.to_csv(),
        }
    }
}

/// Full pipeline for one surface: solve, profile and derived reports.
pub fn solve_document(spec: &SurfaceSpec, config: RunConfig) -> Result<SolveDoc> {
    let opts = config.options();
    let bvp = solve_bvp_with(spec, &opts)?;
    let prof = recover_phi(&bvp)?;
    Ok(SolveDoc { config, spec: *spec, solution: solution_info(&prof) })
}

fn solution_info(prof: &ProfileSolution) -> SolutionInfo {
    let bvp = &prof.bvp;
    let (l, n) = constants_ln(&bvp.spec);
    let t = &bvp.trajectory;
    SolutionInfo {
        c_star: bvp.c_star,
        c_lower_bound: -n / l,
        slope: bvp.coeffs.slope,
        intercept: bvp.coeffs.intercept,
        gamma0: bvp.coeffs.gamma0,
        iterations: bvp.iterations,
        bracket: [bvp.bracket.0, bvp.bracket.1],
        residuals: bvp.residuals,
        ivp: IvpInfo {
            tol: t.tol,
            accepted_steps: t.accepted_steps,
            rejected_steps: t.rejected_steps,
            breakdown_floor: t.floor,
            status: t.status,
        },
        boundary: BoundaryInfo {
            phi_left: prof.phi[0],
            phi_right: *prof.phi.last().expect("non-empty profile"),
            phi_prime_left: prof.phi_prime_left,
            phi_prime_right: prof.phi_prime_right,
            ode_residual: ode_residual(prof),
            chern_residual: chern_identity_residual(prof),
        },
        class_integrals: class_integrals(prof),
        futaki: bando_futaki(prof),
        profile: ProfileColumns {
            gamma: prof.gamma.clone(),
            v: prof.v.clone(),
            phi: prof.phi.clone(),
            lambda: prof.lambda.clone(),
        },
        s_samples: prof.s_samples.clone(),
    }
}

/// Re-integrates at the stored `C*` and compares against the stored values.
pub fn verify_document(doc: &SolveDoc) -> Result<VerifyReport> {
    let spec = doc.spec;
    let rebuilt = SurfaceSpec::new(spec.genus, spec.degree, spec.a, spec.b)?;
    if (rebuilt.gamma_end - spec.gamma_end).abs() > 1e-12 * spec.gamma_end {
        return Err(Error::Parse(format!(
            "stored interval end {} does not match the class (expected {})",
            spec.gamma_end, rebuilt.gamma_end
        )));
    }
    let opts = doc.config.options();
    let sol = &doc.solution;
    let coeffs = coeffs_from_c(&spec, sol.c_star);
    let traj = integrate(&coeffs, opts.ivp_tol(), opts.grid)?;
    if !traj.is_complete() {
        return Ok(VerifyReport { passed: false, within_tolerance: false, checks: Vec::new() });
    }
    let res = shoot_residuals(&traj);

    let mut checks = Vec::new();
    let mut check = |name: &str, stored: f64, recomputed: f64| {
        let ok = (stored - recomputed).abs() <= VERIFY_TOL * stored.abs().max(1.0);
        checks.push(VerifyCheck { name: name.into(), stored, recomputed, ok });
    };
    check("A", sol.slope, coeffs.slope);
    check("B", sol.intercept, coeffs.intercept);
    check("gamma0", sol.gamma0, coeffs.gamma0);
    check("endpoint", sol.residuals.endpoint, res.endpoint);
    check("endpointRel", sol.residuals.endpoint_rel, res.endpoint_rel);
    check("startSlope", sol.residuals.start_slope, res.start_slope);
    check("endSlope", sol.residuals.end_slope, res.end_slope);
    check("interiorMargin", sol.residuals.interior_margin, res.interior_margin);
    let within_tolerance = res.endpoint_rel <= opts.tol;
    let passed = within_tolerance && checks.iter().all(|c| c.ok);
    Ok(VerifyReport { passed, within_tolerance, checks })
}

pub fn read_solve_document(path: &Path) -> Result<SolveDoc> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })?;
    let doc: SolveDoc = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    if doc.config.command != "solve" {
        return Err(Error::Parse(format!("{}: expected a solve document, found {}", path.display(), doc.config.command)));
    }
    Ok(doc)
}

/// Executes one parsed command.
pub fn run(cli: Cli) -> Result<Outcome> {
    let (document, format, output) = match cli.command {
        Command::Solve { common, class } => {
            let config = RunConfig::new("solve", &common, Some(&class));
            let spec = config.spec()?;
            (Document::Solve(Box::new(solve_document(&spec, config)?)), common.format, common.output)
        }
        Command::Scan { common, class, c_min, c_max, steps } => {
            let config = RunConfig::new("scan", &common, Some(&class));
            let spec = config.spec()?;
            let rows = scan_c(&spec, c_min, c_max, steps, &config.options())?;
            (Document::Scan(ScanDoc { config, spec, rows }), common.format, common.output)
        }
        Command::Mstar { common, class } => {
            let config = RunConfig::new("mstar", &common, Some(&class));
            let spec = config.spec()?;
            let threshold = find_m_with(&spec, &config.options())?;
            (Document::Mstar(MstarDoc { config, spec, threshold }), common.format, common.output)
        }
        Command::Phase { common, ms } => {
            let config = RunConfig::new("phase", &common, None);
            let specs = ms
                .iter()
                .map(|&m| SurfaceSpec::normalized(common.genus, common.degree, m))
                .collect::<Result<Vec<_>>>()?;
            let rows = phase_curve(&specs, &config.options())?;
            (Document::Phase(PhaseDoc { config, ms, rows }), common.format, common.output)
        }
        Command::Verify { input, format, output } => {
            let doc = read_solve_document(&input)?;
            (Document::Verify(verify_document(&doc)?), format, output)
        }
        Command::Futaki { common, class } => {
            let config = RunConfig::new("futaki", &common, Some(&class));
            let spec = config.spec()?;
            let bvp = solve_bvp_with(&spec, &config.options())?;
            let prof = recover_phi(&bvp)?;
            let futaki = bando_futaki(&prof);
            let rescaled = rescale(&prof, spec.a)?;
            let doc = FutakiDoc { config, spec, c_star: bvp.c_star, futaki, rescaled };
            (Document::Futaki(doc), common.format, common.output)
        }
        Command::Cone { genus, degree, a, b, format, output } => {
            (Document::Cone(ConeDoc { verdict: cone_check(genus, degree, a, b)? }), format, output)
        }
    };
    Ok(Outcome { document, format, output })
}

/// Writes the rendered outcome to its path or to stdout.
pub fn write_outcome(outcome: &Outcome) -> Result<()> {
    let text = outcome.render()?;
    match &outcome.output {
        Some(path) => std::fs::write(path, text).map_err(|source| Error::Io { path: path.clone(), source }),
        None => {
            use io::Write;
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| Error::Io { path: PathBuf::from("<stdout>"), source })
        }
    }
}

/// Parses arguments, runs and writes; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli).and_then(|o| write_outcome(&o).map(|_| o.exit_code())) {
        Ok(code) => {
            if code != 0 {
                eprintln!("error: verification failed");
            }
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_solver_failure() {
                2
            } else {
                1
            }
        }
    }
}

/// JSON formatter printing every float with 17 significant digits.
struct SciFormatter<'a>(PrettyFormatter<'a>);

impl Formatter for SciFormatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serialises with fixed-width scientific floats; non-finite values become `null`.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("documents serialise infallibly");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

#[derive(SerializeDerive)]
struct Tagged<'a, T: Serialize> {
    command: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

impl Document {
    pub fn command(&self) -> &'static str {
        match self {
            Document::Solve(_) => "solve",
            Document::Scan(_) => "scan",
            Document::Mstar(_) => "mstar",
            Document::Phase(_) => "phase",
            Document::Verify(_) => "verify",
            Document::Futaki(_) => "futaki",
            Document::Cone(_) => "cone",
        }
    }

    pub fn to_json(&self) -> String {
        let command = self.command();
        match self {
            Document::Solve(d) => to_json(d.as_ref()),
            Document::Scan(d) => to_json(d),
            Document::Mstar(d) => to_json(d),
            Document::Phase(d) => to_json(d),
            Document::Futaki(d) => to_json(d),
            Document::Verify(d) => to_json(&Tagged { command, body: d }),
            Document::Cone(d) => to_json(&Tagged { command, body: d }),
        }
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut s = String::new();
        match self {
            Document::Solve(d) => {
                s.push_str("gamma,v,phi,lambda\n");
                let p = &d.solution.profile;
                for i in 0..p.gamma.len() {
                    let _ = writeln!(s, "{},{},{},{}", num(p.gamma[i]), num(p.v[i]), num(p.phi[i]), num(p.lambda[i]));
                }
            }
            Document::Scan(d) => {
                s.push_str("C,status,gammaStar_or_vEnd\n");
                for r in &d.rows {
                    let (status, value) = match &r.outcome {
                        ScanOutcome::Complete { v_end } => ("complete", num(*v_end)),
                        ScanOutcome::Breakdown { gamma_star } => ("breakdown", num(*gamma_star)),
                        ScanOutcome::Failed { .. } => ("failed", String::new()),
                    };
                    let _ = writeln!(s, "{},{status},{value}", num(r.c));
                }
            }
            Document::Phase(d) => {
                s.push_str("m,Cstar,M\n");
                for r in &d.rows {
                    let _ = writeln!(s, "{},{},{}", num(r.m), opt(r.c_star), opt(r.threshold));
                }
            }
            Document::Mstar(d) => {
                s.push_str("m,M,lower,upper\n");
                let t = &d.threshold;
                let _ = writeln!(s, "{},{},{},{}", num(d.spec.m), num(t.value), num(t.lower), num(t.upper));
            }
            Document::Futaki(d) => {
                s.push_str("m,Cstar,lambda0,deviation,kappa,futakiValue,verdict\n");
                let f = &d.futaki;
                let verdict = serde_json::to_value(f.verdict).ok().and_then(|v| v.as_str().map(String::from));
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{}",
                    num(d.spec.m),
                    num(d.c_star),
                    num(f.lambda0),
                    num(f.deviation),
                    num(f.kappa),
                    num(f.futaki_value),
                    verdict.unwrap_or_default()
                );
            }
            Document::Cone(d) => {
                s.push_str("a,b,e1,e2,e3,e4,e5,isKahler\n");
                let v = &d.verdict;
                let e: Vec<String> = v.inequality_values.iter().map(|&x| num(x)).collect();
                let _ = writeln!(s, "{},{},{},{}", num(v.a), num(v.b), e.join(","), v.is_kahler);
            }
            Document::Verify(d) => {
                s.push_str("check,stored,recomputed,ok\n");
                for c in &d.checks {
                    let _ = writeln!(s, "{},{},{},{}", c.name, num(c.stored), num(c.recomputed), c.ok);
                }
            }
        }
        Ok(s)
    }
}
