//! Command-line front end for the certification pipelines: ingest network
//! JSON, run the checks, emit JSON certificates and SVG figures.
//!
//! Exit codes are a stable contract: 0 pass, 1 certification failure,
//! 2 input error, 3 hypothesis/threshold violation.

use std::io::Read;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use netcalib::comparison::{
    compare_quotient_poorer, compare_quotient_richer, compare_same_topology,
};
use netcalib::currents::{boundary, induce_current, mass, verify_identity_calibration};
use netcalib::error::CoreError;
use netcalib::geometry::{
    Point2, Polygon, ToleranceConfig, DEFAULT_EPS_ANGLE, DEFAULT_EPS_FIELD, DEFAULT_EPS_LEN,
};
use netcalib::json::{
    boundary_to_dto, calibration_to_dto, comparison_to_dto, from_json_str, minimality_to_dto,
    network_from_dto, network_to_dto, partition_report_to_dto, polygon_from_dto,
    quotient_from_dto, to_json_string, vertex_ids, CounterexampleDto, CurrentCertificateDto,
    JsonScalar, NetworkDto, OracleDto, PolygonDto, QuotientSpecDto,
};
use netcalib::network::{check_minimal, Network};
use netcalib::partitions::{
    assign_fields, build_partition_domain, build_partition_spec, counterexample,
    counterexample_specs, three_color_faces, verify_paired_calibration,
};
use netcalib::scalar::Q3;
use netcalib::steiner::steiner_oracle;
use netcalib::svg::{render_pair, render_partition};

/// Samples used for the comass sweep in `calibrate-current`.
const COMASS_SAMPLES: u32 = 4096;

#[derive(Parser)]
#[command(
    name = "netcalib",
    version,
    about = "Certify minimizing properties of planar triple-junction networks"
)]
struct Cli {
    /// Run in exact rational-√3 arithmetic; coordinates are snapped to
    /// p/q + (r/s)·√3 with denominators ≤ 24.
    #[arg(long, global = true)]
    exact: bool,

    /// Length tolerance override (float mode only).
    #[arg(long, global = true, value_name = "EPS")]
    eps_len: Option<f64>,

    /// Angle tolerance override in radians (float mode only).
    #[arg(long, global = true, value_name = "EPS")]
    eps_angle: Option<f64>,

    /// Field/residual tolerance override (float mode only).
    #[arg(long, global = true, value_name = "EPS")]
    eps_field: Option<f64>,

    /// Write an SVG figure (calibrate-partition and counterexample only).
    #[arg(long, global = true, value_name = "PATH")]
    svg: Option<PathBuf>,

    /// Seed recorded for reproducibility; current commands are
    /// deterministic and do not consume randomness.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Competitor has the same graph with perturbed vertices.
    Same,
    /// Competitor contains an embedded copy of the reference.
    Embed,
    /// Competitor embeds the reference after collapsing competitor subgraphs.
    Richer,
    /// Competitor lives on a quotient of the reference graph.
    Poorer,
}

#[derive(Subcommand)]
enum Command {
    /// Certify straight embedded edges, vertex orders, and 120° junctions.
    CheckMinimal {
        /// Network JSON path, or "-" for stdin.
        path: String,
    },
    /// Induce the lattice current and verify the identity-form calibration.
    CalibrateCurrent {
        /// Network JSON path, or "-" for stdin.
        path: String,
    },
    /// Certify that a competitor network is at least as long as a reference.
    Compare {
        /// Reference network JSON path, or "-" for stdin.
        ref_path: String,
        /// Competitor network JSON path, or "-" for stdin.
        comp_path: String,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Quotient spec JSON path; required for embed/richer/poorer.
        #[arg(long)]
        quotient: Option<String>,
    },
    /// Fatten a minimal network into a tube and verify the paired
    /// partition calibration on it.
    CalibratePartition {
        /// Network JSON path, or "-" for stdin.
        path: String,
        /// Tube half-width δ (must satisfy δ < √3·d/8 for the shortest edge d).
        #[arg(long)]
        delta: f64,
        /// Endpoint extension δ′ beyond each degree-1 tip.
        #[arg(long)]
        delta_prime: f64,
        /// Optional clipping region JSON: {"outer":[[x,y],...],"holes":[...]}.
        #[arg(long)]
        domain: Option<String>,
    },
    /// Compare the fattened tree's perimeter against the taller-join
    /// competitor family on the same tube.
    Counterexample {
        /// Distance between the two junctions.
        d: f64,
        /// Height of the competitor's join corners.
        h: f64,
        /// Length of the four outer arms.
        outer_len: f64,
        /// Tube half-width.
        delta: f64,
    },
    /// Brute-force shortest Steiner network over ≤ 5 terminals.
    Oracle {
        /// Terminals as x,y pairs, e.g. `0,0 1,0 0.5,0.866`.
        #[arg(required = true, allow_hyphen_values = true)]
        terminals: Vec<String>,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match dispatch(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            exit_code_for(&err)
        }
    };
    std::process::exit(code);
}

/// 2 for malformed input, 3 for violated hypotheses/thresholds, 1 for
/// everything that means "the certificate does not hold".
fn exit_code_for(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<CoreError>() {
        Some(CoreError::InvalidInput(_))
        | Some(CoreError::ExactArithmetic(_))
        | Some(CoreError::Unsupported(_)) => 2,
        Some(CoreError::ThresholdViolation(_))
        | Some(CoreError::HypothesisViolation(_))
        | Some(CoreError::NonTransverse(_))
        | Some(CoreError::InvalidGeometry(_)) => 3,
        Some(_) => 1,
        None => 2,
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    if cli.exact {
        if cli.eps_len.is_some() || cli.eps_angle.is_some() || cli.eps_field.is_some() {
            bail!(CoreError::InvalidInput(
                "tolerance overrides conflict with --exact (exact mode admits no slack)".into()
            ));
        }
        run::<Q3>(cli, &ToleranceConfig::exact())
    } else {
        let tol = ToleranceConfig::float(
            cli.eps_len.unwrap_or(DEFAULT_EPS_LEN),
            cli.eps_angle.unwrap_or(DEFAULT_EPS_ANGLE),
            cli.eps_field.unwrap_or(DEFAULT_EPS_FIELD),
        )?;
        run::<f64>(cli, &tol)
    }
}

fn run<S: JsonScalar>(cli: &Cli, tol: &ToleranceConfig<S>) -> Result<i32> {
    match &cli.command {
        Command::CheckMinimal { path } => {
            reject_svg(cli, "check-minimal")?;
            cmd_check_minimal::<S>(path, tol)
        }
        Command::CalibrateCurrent { path } => {
            reject_svg(cli, "calibrate-current")?;
            cmd_calibrate_current::<S>(path, tol)
        }
        Command::Compare { ref_path, comp_path, mode, quotient } => {
            reject_svg(cli, "compare")?;
            cmd_compare::<S>(ref_path, comp_path, *mode, quotient.as_deref(), tol)
        }
        Command::CalibratePartition { path, delta, delta_prime, domain } => {
            cmd_calibrate_partition::<S>(
                path,
                *delta,
                *delta_prime,
                domain.as_deref(),
                cli.svg.as_deref(),
                tol,
            )
        }
        Command::Counterexample { d, h, outer_len, delta } => {
            cmd_counterexample::<S>(*d, *h, *outer_len, *delta, cli.svg.as_deref(), tol)
        }
        Command::Oracle { terminals } => {
            reject_svg(cli, "oracle")?;
            if cli.exact {
                bail!(CoreError::Unsupported(
                    "the oracle's junction optimizer runs in float mode only".into()
                ));
            }
            cmd_oracle(terminals)
        }
    }
}

fn reject_svg(cli: &Cli, command: &str) -> Result<()> {
    if cli.svg.is_some() {
        bail!(CoreError::InvalidInput(format!(
            "{command} emits no figure; --svg applies to calibrate-partition and counterexample"
        )));
    }
    Ok(())
}

fn read_input(path: &str) -> Result<String> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .context("reading network JSON from stdin")?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {path}"))
    }
}

fn load_network<S: JsonScalar>(path: &str) -> Result<(NetworkDto, Network<S>)> {
    let text = read_input(path)?;
    let dto: NetworkDto = from_json_str(&text)?;
    let net = network_from_dto(&dto)?;
    Ok((dto, net))
}

fn emit<T: serde::Serialize>(value: &T) -> Result<()> {
    println!("{}", to_json_string(value)?);
    Ok(())
}

fn cmd_check_minimal<S: JsonScalar>(path: &str, tol: &ToleranceConfig<S>) -> Result<i32> {
    let (_, net) = load_network::<S>(path)?;
    let cert = check_minimal(&net, tol)?;
    emit(&minimality_to_dto(&cert))?;
    Ok(if cert.is_minimal { 0 } else { 1 })
}

fn cmd_calibrate_current<S: JsonScalar>(path: &str, tol: &ToleranceConfig<S>) -> Result<i32> {
    let (_, net) = load_network::<S>(path)?;
    let cert = check_minimal(&net, tol)?;
    if !cert.is_minimal {
        emit(&minimality_to_dto(&cert))?;
        return Ok(1);
    }
    let induced = induce_current(&net, tol)?;
    let t = &induced.current;
    let total_mass = mass(t)?;
    let length = net.length()?;
    let b = boundary(t, tol);
    let report = verify_identity_calibration(t, COMASS_SAMPLES, tol)?;
    let gap = if total_mass > length {
        total_mass.clone() - length.clone()
    } else {
        length.clone() - total_mass.clone()
    };
    let mass_equals_length = gap <= tol.eps_len;
    let mut boundary_sum = [0i64; 2];
    for atom in &b.atoms {
        boundary_sum[0] += atom.coefficient.n;
        boundary_sum[1] += atom.coefficient.m;
    }
    let dto = CurrentCertificateDto {
        mass: total_mass.to_f64(),
        length: length.to_f64(),
        mass_equals_length,
        boundary: boundary_to_dto(&b),
        boundary_sum,
        calibration: calibration_to_dto(&report),
    };
    emit(&dto)?;
    Ok(if report.passed && mass_equals_length { 0 } else { 1 })
}

fn cmd_compare<S: JsonScalar>(
    ref_path: &str,
    comp_path: &str,
    mode: Mode,
    quotient: Option<&str>,
    tol: &ToleranceConfig<S>,
) -> Result<i32> {
    let (ref_dto, refn) = load_network::<S>(ref_path)?;
    let (comp_dto, comp) = load_network::<S>(comp_path)?;
    let cert = match mode {
        Mode::Same => {
            if quotient.is_some() {
                bail!(CoreError::InvalidInput(
                    "--quotient does not apply to mode same".into()
                ));
            }
            compare_same_topology(&refn, &comp, tol)?
        }
        Mode::Embed | Mode::Richer | Mode::Poorer => {
            let path = quotient.ok_or_else(|| {
                anyhow!(CoreError::InvalidInput(format!(
                    "mode {} requires --quotient",
                    match mode {
                        Mode::Embed => "embed",
                        Mode::Richer => "richer",
                        _ => "poorer",
                    }
                )))
            })?;
            let text = read_input(path)?;
            let qdto: QuotientSpecDto = from_json_str(&text)?;
            let ref_ids = vertex_ids(&ref_dto)?;
            let comp_ids = vertex_ids(&comp_dto)?;
            if mode == Mode::Poorer {
                // Collapsed subgraphs live in the reference.
                let q = quotient_from_dto(&qdto, &ref_ids, refn.edges.len(), &ref_ids, &comp_ids)?;
                compare_quotient_poorer(&refn, &comp, &q, tol)?
            } else {
                // Collapsed subgraphs live in the competitor; embed mode is
                // the empty-collapse special case.
                if mode == Mode::Embed && !qdto.collapse.is_empty() {
                    bail!(CoreError::InvalidInput(
                        "mode embed takes an empty collapse list; use richer to collapse subgraphs"
                            .into()
                    ));
                }
                let q = quotient_from_dto(&qdto, &comp_ids, comp.edges.len(), &ref_ids, &comp_ids)?;
                compare_quotient_richer(&refn, &comp, &q, tol)?
            }
        }
    };
    emit(&comparison_to_dto(&cert))?;
    Ok(if cert.verdict { 0 } else { 1 })
}

fn cmd_calibrate_partition<S: JsonScalar>(
    path: &str,
    delta: f64,
    delta_prime: f64,
    domain: Option<&str>,
    svg: Option<&std::path::Path>,
    tol: &ToleranceConfig<S>,
) -> Result<i32> {
    let (_, net) = load_network::<S>(path)?;
    let delta = S::from_json_number(delta)?;
    let delta_prime = S::from_json_number(delta_prime)?;
    let region: Option<Polygon<S>> = match domain {
        None => None,
        Some(path) => {
            let text = read_input(path)?;
            let dto: PolygonDto = from_json_str(&text)?;
            Some(polygon_from_dto(&dto)?)
        }
    };
    let (omega, ext) = build_partition_domain(&net, &delta, &delta_prime, region.as_ref(), tol)?;
    let colored = three_color_faces(&ext, &omega, tol)?;
    let spec = build_partition_spec(&omega, &colored)?;
    let fields = assign_fields(&ext, &omega, &colored, tol)?;
    let report = verify_paired_calibration(&spec, &fields, tol)?;
    if let Some(out) = svg {
        std::fs::write(out, render_partition(&spec, Some(&fields)))
            .with_context(|| format!("writing {}", out.display()))?;
    }
    emit(&partition_report_to_dto(&report))?;
    Ok(if report.verdict { 0 } else { 1 })
}

fn cmd_counterexample<S: JsonScalar>(
    d: f64,
    h: f64,
    outer_len: f64,
    delta: f64,
    svg: Option<&std::path::Path>,
    tol: &ToleranceConfig<S>,
) -> Result<i32> {
    let d = S::from_json_number(d)?;
    let h = S::from_json_number(h)?;
    let outer_len = S::from_json_number(outer_len)?;
    let delta = S::from_json_number(delta)?;
    let report = counterexample(&d, &outer_len, &h, &delta, tol)?;
    if let Some(out) = svg {
        let (spec_e, spec_f, _, _) = counterexample_specs(&d, &outer_len, &h, &delta, tol)?;
        std::fs::write(out, render_pair(&spec_e, &spec_f))
            .with_context(|| format!("writing {}", out.display()))?;
    }
    emit(&CounterexampleDto {
        p_e: report.p_e.to_f64(),
        p_f: report.p_f.to_f64(),
        delta_p: report.delta_p.to_f64(),
        improves: report.improves,
    })?;
    Ok(0)
}

fn cmd_oracle(terminals: &[String]) -> Result<i32> {
    let mut points = Vec::with_capacity(terminals.len());
    for t in terminals {
        let (x, y) = t.split_once(',').ok_or_else(|| {
            anyhow!(CoreError::InvalidInput(format!(
                "terminal {t:?} is not an x,y pair"
            )))
        })?;
        let parse = |s: &str| -> Result<f64> {
            s.trim()
                .parse()
                .map_err(|e| anyhow!(CoreError::InvalidInput(format!("terminal {t:?}: {e}"))))
        };
        points.push(Point2::new(parse(x)?, parse(y)?));
    }
    let (length, net) = steiner_oracle(&points)?;
    emit(&OracleDto {
        length,
        network: network_to_dto(&net),
    })?;
    Ok(0)
}
