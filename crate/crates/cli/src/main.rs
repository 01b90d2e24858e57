use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::Vector3;
use serde::Serialize;
use supcone::geom::off::read_off;
use supcone::harness::{scene_cones, SceneSpec};
use supcone::symmetry::case_split;
use supcone::topology::index_report;
use supcone::{
    congruence_distance, detect_symmetries, pairwise_congruence_matrix, support_cone,
    two_sequence_limits, verify_scene, Error, FieldKind, Scene, SupportCone, TriMesh, Verdict,
};

const EXIT_USAGE: u8 = 1;
const EXIT_NON_CONGRUENCE: u8 = 2;
const EXIT_SCENE_INVALID: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;

#[derive(Parser)]
#[command(
    name = "supcone",
    version,
    about = "Support-cone congruence and ball-characterization checks"
)]
struct Cli {
    /// Congruence / symmetry tolerance (overrides the scene's).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for apex sampling and random fields.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Field {
    Rotational,
    Projected,
    Poly,
}

impl From<Field> for FieldKind {
    fn from(f: Field) -> Self {
        match f {
            Field::Rotational => FieldKind::Rotational,
            Field::Projected => FieldKind::Projected,
            Field::Poly => FieldKind::Poly,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Support cone of the inner body from one scene apex.
    Cone {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        apex: usize,
    },
    /// Pairwise congruence distances between scene cones.
    Match {
        #[arg(long)]
        scene: PathBuf,
        /// `all` or a single pair `i,j`.
        #[arg(long, default_value = "all")]
        pairs: String,
        /// Also write the witnesses as JSON here.
        #[arg(long)]
        witnesses: Option<PathBuf>,
    },
    /// Symmetry elements of the cone from one scene apex.
    Symmetry {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        apex: usize,
    },
    /// Full scene verification.
    Verify {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Vertex indices and their sum for a tangent field on a sphere mesh.
    HairyBall {
        /// OFF mesh; vertices are projected to the unit sphere.
        #[arg(long)]
        mesh: Option<PathBuf>,
        /// Icosphere level used when no mesh is given.
        #[arg(long, default_value_t = 4)]
        level: u32,
        #[arg(long, value_enum)]
        field: Field,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Limits of the meridian frame along two approaches to the antipode.
    FrameField {
        #[arg(long)]
        phi1: f64,
        #[arg(long)]
        phi2: f64,
        #[arg(long, default_value_t = 32)]
        steps: usize,
        /// Base point `x,y,z` (normalized).
        #[arg(long, default_value = "0,0,1")]
        base: String,
    },
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::SceneInvalid { .. } | Error::Parse(_) | Error::Json(_)) => EXIT_SCENE_INVALID,
        Some(Error::DegenerateBody(_) | Error::ApexInsideBody { .. }) => EXIT_SCENE_INVALID,
        Some(
            Error::Numerical(_)
            | Error::RankDeficient(_)
            | Error::IndeterminateIndex { .. }
            | Error::Singularity { .. },
        ) => EXIT_NUMERICAL,
        _ => EXIT_USAGE,
    }
}

fn load(path: &Path, cli: &Cli) -> anyhow::Result<Scene> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut spec: SceneSpec =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("scene: {e}")))?;
    if let Some(tol) = cli.tol {
        spec.config.tol = Some(tol);
    }
    if let Some(seed) = cli.seed {
        spec.sampling.seed = seed;
    }
    Ok(Scene::from_spec(spec)?)
}

fn cone_at(scene: &Scene, i: usize) -> anyhow::Result<SupportCone> {
    let Some(x) = scene.apexes().get(i) else {
        bail!("apex {i} out of range (scene has {})", scene.apexes().len());
    };
    Ok(support_cone(&scene.inner, x, scene.samples_per_cone())?)
}

fn emit(text: &str, out: Option<&Path>) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn parse_pair(s: &str) -> anyhow::Result<(usize, usize)> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts[..] {
        [i, j] => Ok((i.parse()?, j.parse()?)),
        _ => bail!("--pairs expects `all` or `i,j`, got {s:?}"),
    }
}

fn parse_vec(s: &str) -> anyhow::Result<Vector3<f64>> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()?;
    if v.len() != 3 {
        bail!("expected x,y,z, got {s:?}");
    }
    Ok(Vector3::new(v[0], v[1], v[2]))
}

fn run(cli: &Cli) -> anyhow::Result<u8> {
    match &cli.command {
        Command::Cone { scene, apex } => {
            let cone = cone_at(&load(scene, cli)?, *apex)?;
            let text = match cli.format {
                Format::Json => json(&cone)?,
                Format::Csv => {
                    let mut s = String::from("x,y,z\n");
                    for r in cone.rays() {
                        writeln!(s, "{:e},{:e},{:e}", r.x, r.y, r.z)?;
                    }
                    s
                }
            };
            emit(&text, None)?;
        }
        Command::Match {
            scene,
            pairs,
            witnesses,
        } => {
            let scene = load(scene, cli)?;
            let cfg = scene.congruence_config();
            if pairs == "all" {
                let m = pairwise_congruence_matrix(&scene_cones(&scene)?, &cfg);
                if let Some(p) = witnesses {
                    emit(&json(&m.to_json())?, Some(p))?;
                }
                let text = match cli.format {
                    Format::Csv => m.to_csv(),
                    Format::Json => json(&m.to_json())?,
                };
                emit(&text, None)?;
            } else {
                let (i, j) = parse_pair(pairs)?;
                let r = congruence_distance(&cone_at(&scene, i)?, &cone_at(&scene, j)?, &cfg);
                if let Some(p) = witnesses {
                    emit(&json(&r)?, Some(p))?;
                }
                let text = match cli.format {
                    Format::Csv => format!(
                        "i,j,distance,congruent\n{i},{j},{:e},{}\n",
                        r.distance, r.congruent
                    ),
                    Format::Json => json(&r)?,
                };
                emit(&text, None)?;
            }
        }
        Command::Symmetry { scene, apex } => {
            let scene = load(scene, cli)?;
            let cone = cone_at(&scene, *apex)?;
            let tol = cli
                .tol
                .unwrap_or_else(|| supcone::symmetry::default_tol(&cone));
            let report = detect_symmetries(&cone, tol);
            let class = case_split(&report);
            let text = match cli.format {
                Format::Json => json(&serde_json::json!({ "class": class, "report": report }))?,
                Format::Csv => format!(
                    "class,group_order,axes,planes,is_right_circular,half_angle\n{class},{},{},{},{},{}\n",
                    report.group_order,
                    report.axes.len(),
                    report.planes.len(),
                    report.is_right_circular,
                    report.half_angle.map_or(String::new(), |h| format!("{h:e}")),
                ),
            };
            emit(&text, None)?;
        }
        Command::Verify { scene, out } => {
            let report = verify_scene(&load(scene, cli)?)?;
            let text = match cli.format {
                Format::Json => json(&report)?,
                Format::Csv => {
                    let s = &report.congruence_matrix_summary;
                    format!(
                        "verdict,max,mean,median,eta_min_separation,eta_coverage\n{},{:e},{:e},{:e},{:e},{}\n",
                        report.verdict.as_str(),
                        s.max,
                        s.mean,
                        s.median,
                        report.eta_min_separation,
                        report.eta_coverage,
                    )
                }
            };
            emit(&text, out.as_deref())?;
            eprintln!("verdict: {}", report.verdict.as_str());
            if report.verdict == Verdict::NonCongruenceWitness {
                return Ok(EXIT_NON_CONGRUENCE);
            }
        }
        Command::HairyBall {
            mesh,
            level,
            field,
            out,
        } => {
            let mesh = match mesh {
                Some(p) => TriMesh::from_off(&read_off(p)?)?,
                None => supcone::icosphere(*level),
            };
            let field = FieldKind::from(*field).build(&mesh, cli.seed.unwrap_or(0));
            let report = index_report(&field)?;
            let text = match cli.format {
                Format::Json => json(&report)?,
                Format::Csv => {
                    let mut s = String::from("vertex,index\n");
                    for v in &report.singular {
                        writeln!(s, "{},{}", v.vertex, v.index)?;
                    }
                    s
                }
            };
            emit(&text, out.as_deref())?;
            eprintln!("index sum: {}", report.sum);
        }
        Command::FrameField {
            phi1,
            phi2,
            steps,
            base,
        } => {
            let base = parse_vec(base)?;
            if !base.iter().all(|x| x.is_finite()) || base.norm() == 0.0 {
                bail!("base point must be finite and nonzero");
            }
            let r = two_sequence_limits(&base.normalize(), *phi1, *phi2, *steps)?;
            let text = match cli.format {
                Format::Json => json(&r)?,
                Format::Csv => {
                    let mut s = String::from("longitude,cauchy_spread,converged,final_gap\n");
                    for l in [&r.first, &r.second] {
                        writeln!(
                            s,
                            "{},{:e},{},{:e}",
                            l.longitude, l.cauchy_spread, l.converged, l.final_gap
                        )?;
                    }
                    writeln!(s, "# relative_distance,{:e}", r.relative_distance)?;
                    s
                }
            };
            emit(&text, None)?;
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            if let Some(Error::SceneInvalid {
                sample: Some(p), ..
            }) = e.downcast_ref::<Error>()
            {
                eprintln!("offending sample: [{}, {}, {}]", p[0], p[1], p[2]);
            }
            ExitCode::from(exit_code(&e))
        }
    }
}
