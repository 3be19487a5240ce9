//! End-to-end runs: a validated run configuration streams raw layers
//! through one tracker inside a dedicated worker pool, post-processes the
//! features, exports JSON/VTK, and prints a summary.
//!
//! The clap command tree below *is* the run configuration: every field is
//! validated before any compute or output, and every semantic parameter
//! is echoed into the output document's provenance block. Execution-only
//! details (worker count, wall time) are printed to stdout but kept out
//! of the files, so output bytes never depend on them.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::exact::eigen::DEFAULT_EIGEN_TOL;
use crate::exact::quant::DEFAULT_QUANT_BITS;
use crate::field::raw::{read_sequence, write_sequence, Dtype};
use crate::field::TimeSeriesField;
use crate::io::json::{
    self, curve_from_record, curve_to_record, isovolume_from_record, isovolume_to_record,
    slice_mesh_to_record, slice_point_to_record, surface_to_record, trajectory_from_record,
    trajectory_to_record, FeatureDocument, Provenance,
};
use crate::io::vtk::{
    curves_to_polydata, isovolume_to_unstructured, slice_mesh_to_polydata,
    slice_points_to_polydata, surfaces_to_polydata, trajectories_to_polydata,
    write_vtk_polydata, write_vtk_unstructured,
};
use crate::mesh::extruded::ExtrudedMesh;
use crate::mesh::regular::RegularSpacetimeMesh;
use crate::mesh::{ElementKind, SpacetimeMesh};
use crate::post::{self, FilterSpec};
use crate::synthetic::SyntheticSpec;
use crate::track::critical::{track_critical, CriticalConfig, CriticalDomain, CriticalField};
use crate::track::isosurface::{slice_isovolume, track_isosurface, IsoConfig};
use crate::track::vortex::{track_vortex, PhaseField};
use crate::track::Trajectory;

/// Exact perturbed predicates on (default), or plain float signs — the
/// off mode exists to demonstrate how degenerate inputs break without
/// the perturbation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SosMode {
    On,
    Off,
}

/// How the raw samples are interpreted by the critical-point tracker.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FieldKind {
    /// n components per sample: track zeros of the field itself.
    Vector,
    /// 1 component per sample: track zeros of the derived gradient.
    Scalar,
}

#[derive(Parser, Clone, Debug)]
#[command(
    name = "chronomesh",
    version,
    about = "Track critical points, vortex cores, and level sets through \
             time by meshing spacetime with simplices"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Clone, Debug)]
pub enum Command {
    /// Track critical points of a time-varying scalar or vector field.
    TrackCritical(TrackCriticalCmd),
    /// Track phase singularities (vortex cores) of an angle/complex field.
    TrackVortex(TrackVortexCmd),
    /// Sweep an isosurface through time into a spacetime volume.
    TrackIsosurface(TrackIsosurfaceCmd),
    /// Generate synthetic datasets with known ground truth.
    Synth(SynthCmd),
    /// Slice a previously written feature document at a fixed time.
    Slice(SliceCmd),
}

/// Raw-volume input plus the spatial domain it lives on.
#[derive(Args, Clone, Debug)]
pub struct InputArgs {
    /// Raw volume path pattern with one %d / %0Nd timestep placeholder.
    #[arg(long)]
    pub input: String,
    /// Regular grid dimensions, comma separated (2 or 3 values).
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,
    /// Unstructured simplicial mesh (JSON with vertices/cells arrays).
    #[arg(long, conflicts_with = "dims")]
    pub mesh: Option<PathBuf>,
    /// Raw sample type: f32 or f64.
    #[arg(long, default_value = "f32")]
    pub dtype: String,
    /// Components per sample in the raw files.
    #[arg(long, default_value_t = 1)]
    pub components: usize,
    /// Number of time layers to read.
    #[arg(long)]
    pub timesteps: usize,
}

/// Output destinations shared by the tracking subcommands.
#[derive(Args, Clone, Debug)]
pub struct OutputArgs {
    /// Legacy ASCII VTK output path.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// JSON feature document output path.
    #[arg(long = "output-json")]
    pub output_json: Option<PathBuf>,
    /// Physical time-step size; scales exported VTK time values only.
    #[arg(long = "delta-t", default_value_t = 1.0)]
    pub delta_t: f64,
}

#[derive(Args, Clone, Debug)]
pub struct TrackCriticalCmd {
    #[command(flatten)]
    pub input: InputArgs,
    /// Input interpretation (vector field zeros, or scalar gradient zeros).
    #[arg(long, value_enum, default_value_t = FieldKind::Vector)]
    pub field: FieldKind,
    #[arg(long, value_enum, default_value_t = SosMode::On)]
    pub sos: SosMode,
    /// Fractional bits used to quantize samples for the exact predicates.
    #[arg(long = "quant-bits", default_value_t = DEFAULT_QUANT_BITS)]
    pub quant_bits: u32,
    /// Constant frame velocity vx,vy[,vz] subtracted before detection.
    #[arg(long = "frame-velocity", value_delimiter = ',', allow_negative_numbers = true)]
    pub frame_velocity: Option<Vec<f64>>,
    /// Drop chains spanning fewer layers than this (inclusive count).
    #[arg(long = "min-duration", default_value_t = 0.0)]
    pub min_duration: f64,
    /// Drop closed loops.
    #[arg(long = "drop-loops")]
    pub drop_loops: bool,
    /// Drop chains whose scalar spread (max − min) is below this.
    #[arg(long = "min-persistence", allow_negative_numbers = true)]
    pub min_persistence: Option<f64>,
    /// Majority half-window for type-label smoothing (0 = off).
    #[arg(long = "smooth-window", default_value_t = 0)]
    pub smooth_window: usize,
    /// Worker threads for the detection sweeps (0 = all cores).
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Clone, Debug)]
pub struct TrackVortexCmd {
    /// Input components: 1 = phase angle, 2 = interleaved (re, im).
    #[command(flatten)]
    pub input: InputArgs,
    /// Worker threads for the detection sweeps (0 = all cores).
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Clone, Debug)]
pub struct TrackIsosurfaceCmd {
    #[command(flatten)]
    pub input: InputArgs,
    /// Level value whose surface is swept through time.
    #[arg(long, allow_negative_numbers = true)]
    pub isovalue: f64,
    #[arg(long, value_enum, default_value_t = SosMode::On)]
    pub sos: SosMode,
    /// Fractional bits used to quantize samples for the exact predicates.
    #[arg(long = "quant-bits", default_value_t = DEFAULT_QUANT_BITS)]
    pub quant_bits: u32,
    /// Write one extra sliced surface at this time (layer units).
    #[arg(long = "slice-at", allow_negative_numbers = true)]
    pub slice_at: Option<f64>,
    /// Worker threads for the detection sweeps (0 = all cores).
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Clone, Debug)]
pub struct SynthCmd {
    /// moving_minimum | double_gyre | spiral_woven | merger | moving_plane
    /// | line_vortex.
    #[arg(long)]
    pub kind: String,
    /// Grid dimensions override, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,
    /// Layer count override.
    #[arg(long)]
    pub timesteps: Option<usize>,
    /// Noise seed override.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Additive Gaussian noise level (0 = noise free).
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Time-step size used by time-parameterized generators.
    #[arg(long = "delta-t")]
    pub delta_t: Option<f64>,
    /// Start position x,y[,z] for generators parameterized by one.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub x0: Option<Vec<f64>>,
    /// Drift velocity per layer, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub d: Option<Vec<f64>>,
    /// Plane slope for the moving-plane generator.
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Raw output path pattern with one %d / %0Nd placeholder.
    #[arg(long)]
    pub output: String,
    /// Raw sample type to write: f32 or f64.
    #[arg(long, default_value = "f32")]
    pub dtype: String,
    /// Where to write the spatial mesh of mesh-based generators.
    #[arg(long = "output-mesh")]
    pub output_mesh: Option<PathBuf>,
}

#[derive(Args, Clone, Debug)]
pub struct SliceCmd {
    /// Feature document (JSON) to slice.
    #[arg(long)]
    pub input: PathBuf,
    /// Slice time in layer units.
    #[arg(long = "slice-at", allow_negative_numbers = true)]
    pub slice_at: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

/// Maps an error to the process exit code: configuration/validation
/// problems are usage errors (2), everything else is a runtime failure (1).
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::DimensionRange(..) => 2,
        _ => 1,
    }
}

/// Executes one parsed invocation end to end.
pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::TrackCritical(cmd) => exec_track_critical(cmd),
        Command::TrackVortex(cmd) => exec_track_vortex(cmd),
        Command::TrackIsosurface(cmd) => exec_track_isosurface(cmd),
        Command::Synth(cmd) => exec_synth(cmd),
        Command::Slice(cmd) => exec_slice(cmd),
    }
}

// ---------------------------------------------------------------------
// Shared plumbing.

/// The spatial domain with its extrusion, owned for the run's duration.
enum Domain {
    Grid(RegularSpacetimeMesh),
    Unstructured(ExtrudedMesh),
}

impl Domain {
    fn mesh(&self) -> &dyn SpacetimeMesh {
        match self {
            Domain::Grid(m) => m,
            Domain::Unstructured(m) => m,
        }
    }

    fn describe(&self) -> String {
        match self {
            Domain::Grid(m) => {
                let d = m.spatial_dims();
                format!(
                    "regular {}, {} layers",
                    d.iter().filter(|&&x| x > 1).map(|x| x.to_string()).collect::<Vec<_>>().join("x"),
                    m.timesteps()
                )
            }
            Domain::Unstructured(m) => format!(
                "unstructured {}D, {} vertices, {} layers",
                m.base().dim(),
                m.base().vertex_count(),
                m.timesteps()
            ),
        }
    }
}

fn build_domain(input: &InputArgs) -> Result<Domain> {
    if input.timesteps < 1 {
        return Err(Error::Config("--timesteps must be at least 1".into()));
    }
    match (&input.dims, &input.mesh) {
        (Some(dims), None) => {
            if !(2..=3).contains(&dims.len()) || dims.iter().any(|&d| d < 2) {
                return Err(Error::Config(format!(
                    "--dims takes 2 or 3 values, each at least 2; got {dims:?}"
                )));
            }
            Ok(Domain::Grid(RegularSpacetimeMesh::new(dims, input.timesteps)?))
        }
        (None, Some(path)) => {
            let base = json::read_mesh_json(path)?;
            Ok(Domain::Unstructured(ExtrudedMesh::new(base, input.timesteps)?))
        }
        _ => Err(Error::Config(
            "exactly one of --dims or --mesh must be given".into(),
        )),
    }
}

fn read_input(input: &InputArgs, domain: &Domain) -> Result<TimeSeriesField> {
    let dtype = Dtype::from_str(&input.dtype)?;
    let samples = domain.mesh().verts_per_layer() as usize;
    read_sequence(&input.input, input.timesteps, samples, input.components, dtype)
}

/// Runs `f` inside a dedicated pool so `--threads` never leaks into other
/// invocations in the same process.
fn with_pool<T: Send>(threads: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("building worker pool: {e}")))?
        .install(f)
}

fn provenance(command: &str, params: Vec<(&str, String)>) -> Provenance {
    Provenance {
        tool: format!("chronomesh {}", env!("CARGO_PKG_VERSION")),
        command: command.to_string(),
        parameters: params
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect(),
    }
}

fn input_params(input: &InputArgs) -> Vec<(&'static str, String)> {
    let mut p = vec![
        ("input", input.input.clone()),
        ("dtype", input.dtype.clone()),
        ("components", input.components.to_string()),
        ("timesteps", input.timesteps.to_string()),
    ];
    if let Some(dims) = &input.dims {
        p.push(("dims", join(dims)));
    }
    if let Some(mesh) = &input.mesh {
        p.push(("mesh", mesh.display().to_string()));
    }
    p
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn vec3(xs: &[f64], flag: &str) -> Result<[f64; 3]> {
    if !(2..=3).contains(&xs.len()) {
        return Err(Error::Config(format!(
            "{flag} takes 2 or 3 comma-separated values, got {}",
            xs.len()
        )));
    }
    let mut v = [0.0; 3];
    v[..xs.len()].copy_from_slice(xs);
    Ok(v)
}

/// Total spacetime elements of one dimension over all layers and kinds.
fn swept_elements(mesh: &dyn SpacetimeMesh, k: usize) -> u64 {
    let mut total = 0;
    for layer in 0..mesh.timesteps() as i32 {
        total += mesh.element_count(k, ElementKind::Ordinal, layer);
        total += mesh.element_count(k, ElementKind::Interval, layer);
    }
    total
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("vtk");
    path.with_file_name(format!("{stem}{suffix}.{ext}"))
}

fn print_diagnostics(diagnostics: &BTreeMap<String, u64>) {
    for (key, value) in diagnostics {
        println!("  {key}: {value}");
    }
}

// ---------------------------------------------------------------------
// Subcommand bodies.

fn exec_track_critical(cmd: &TrackCriticalCmd) -> Result<()> {
    let domain = build_domain(&cmd.input)?;
    let frame_velocity = cmd
        .frame_velocity
        .as_deref()
        .map(|v| vec3(v, "--frame-velocity"))
        .transpose()?;
    let field_data = read_input(&cmd.input, &domain)?;
    let cfg = CriticalConfig {
        quant_bits: cmd.quant_bits,
        use_sos: cmd.sos == SosMode::On,
        eigen_tol: DEFAULT_EIGEN_TOL,
        frame_velocity,
    };
    let field = match cmd.field {
        FieldKind::Vector => CriticalField::Vector(&field_data),
        FieldKind::Scalar => CriticalField::Scalar(&field_data),
    };

    let start = Instant::now();
    let result = with_pool(cmd.threads, || {
        let dom = match &domain {
            Domain::Grid(m) => CriticalDomain::Grid(m),
            Domain::Unstructured(m) => CriticalDomain::Unstructured(m),
        };
        track_critical(&dom, &field, &cfg)
    })?;
    let elapsed = start.elapsed();

    let detections = result.detections;
    let diagnostics = result.diagnostics;
    let total_chains = result.trajectories.len();
    let mut trajectories = post::filter(
        result.trajectories,
        &FilterSpec {
            min_duration: cmd.min_duration,
            drop_loops: cmd.drop_loops,
            min_persistence: cmd.min_persistence,
            kinds: Vec::new(),
        },
    );
    if cmd.smooth_window > 0 {
        for t in &mut trajectories {
            post::smooth_types(t, cmd.smooth_window);
        }
    }
    let components = component_count(&trajectories);

    let mut params = input_params(&cmd.input);
    params.extend([
        ("field", format!("{:?}", cmd.field).to_lowercase()),
        ("sos", if cfg.use_sos { "on".into() } else { "off".into() }),
        ("quant-bits", cmd.quant_bits.to_string()),
        ("min-duration", cmd.min_duration.to_string()),
        ("drop-loops", cmd.drop_loops.to_string()),
        ("smooth-window", cmd.smooth_window.to_string()),
        ("delta-t", cmd.out.delta_t.to_string()),
    ]);
    if let Some(p) = cmd.min_persistence {
        params.push(("min-persistence", p.to_string()));
    }
    if let Some(v) = frame_velocity {
        params.push(("frame-velocity", join(&v)));
    }
    let mut doc = FeatureDocument::new("critical-trajectories", provenance("track-critical", params));
    doc.trajectories = trajectories.iter().map(trajectory_to_record).collect();
    doc.diagnostics = diagnostics.clone();
    if let Some(path) = &cmd.out.output_json {
        json::write_json(&doc, path)?;
    }
    if let Some(path) = &cmd.out.output {
        write_vtk_polydata(&trajectories_to_polydata(&trajectories, cmd.out.delta_t), path)?;
    }

    let mesh = domain.mesh();
    let n = mesh.spatial_dim();
    println!("track-critical: {}", domain.describe());
    println!(
        "  swept elements: {} detection simplices, {} pairing simplices",
        swept_elements(mesh, n),
        swept_elements(mesh, n + 1)
    );
    println!("  detections: {detections}");
    println!("  chains: {} kept of {total_chains} ({components} components)", trajectories.len());
    print_diagnostics(&diagnostics);
    println!("  wall time: {:.3} s", elapsed.as_secs_f64());
    Ok(())
}

fn component_count(trajectories: &[Trajectory]) -> usize {
    let mut ids: Vec<&str> = trajectories.iter().map(|t| t.id.as_str()).collect();
    ids.sort_unstable();
    ids.dedup();
    ids.len()
}

fn exec_track_vortex(cmd: &TrackVortexCmd) -> Result<()> {
    let domain = build_domain(&cmd.input)?;
    let field_data = read_input(&cmd.input, &domain)?;
    let field = match cmd.input.components {
        1 => PhaseField::Angle(&field_data),
        2 => PhaseField::Complex(&field_data),
        other => {
            return Err(Error::Config(format!(
                "--components must be 1 (angle) or 2 (re,im) for vortex input, got {other}"
            )))
        }
    };

    let start = Instant::now();
    let result = with_pool(cmd.threads, || track_vortex(domain.mesh(), &field))?;
    let elapsed = start.elapsed();

    let mut params = input_params(&cmd.input);
    params.push(("delta-t", cmd.out.delta_t.to_string()));
    let mut doc = FeatureDocument::new("vortex", provenance("track-vortex", params));
    doc.surfaces = result.surfaces.iter().map(surface_to_record).collect();
    doc.curves = result.curves.iter().map(curve_to_record).collect();
    doc.diagnostics = result.diagnostics.clone();
    if let Some(path) = &cmd.out.output_json {
        json::write_json(&doc, path)?;
    }
    if let Some(path) = &cmd.out.output {
        write_vtk_polydata(&surfaces_to_polydata(&result.surfaces, cmd.out.delta_t), path)?;
        let curves = sibling(path, "-curves");
        write_vtk_polydata(&curves_to_polydata(&result.curves, cmd.out.delta_t), &curves)?;
    }

    let mesh = domain.mesh();
    println!("track-vortex: {}", domain.describe());
    println!(
        "  swept elements: {} triangles, {} tetrahedra, {} pentachora",
        swept_elements(mesh, 2),
        swept_elements(mesh, 3),
        swept_elements(mesh, 4)
    );
    println!("  detections: {}", result.detections);
    println!(
        "  surfaces: {} ({} per-layer curves)",
        result.surfaces.len(),
        result.curves.len()
    );
    print_diagnostics(&result.diagnostics);
    println!("  wall time: {:.3} s", elapsed.as_secs_f64());
    Ok(())
}

fn exec_track_isosurface(cmd: &TrackIsosurfaceCmd) -> Result<()> {
    let domain = build_domain(&cmd.input)?;
    let field_data = read_input(&cmd.input, &domain)?;
    let cfg = IsoConfig {
        quant_bits: cmd.quant_bits,
        use_sos: cmd.sos == SosMode::On,
    };

    let start = Instant::now();
    let vol = with_pool(cmd.threads, || {
        track_isosurface(domain.mesh(), &field_data, cmd.isovalue, &cfg)
    })?;
    let elapsed = start.elapsed();

    let mut params = input_params(&cmd.input);
    params.extend([
        ("isovalue", cmd.isovalue.to_string()),
        ("sos", if cfg.use_sos { "on".into() } else { "off".into() }),
        ("quant-bits", cmd.quant_bits.to_string()),
        ("delta-t", cmd.out.delta_t.to_string()),
    ]);
    if let Some(t) = cmd.slice_at {
        params.push(("slice-at", t.to_string()));
    }
    let mut doc = FeatureDocument::new("isovolume", provenance("track-isosurface", params));
    doc.isovolume = Some(isovolume_to_record(&vol));
    doc.diagnostics = vol.diagnostics.clone();
    if let Some(path) = &cmd.out.output_json {
        json::write_json(&doc, path)?;
    }
    let mut slice_files = 0;
    if let Some(path) = &cmd.out.output {
        write_vtk_unstructured(&isovolume_to_unstructured(&vol, cmd.out.delta_t), path)?;
        for tau in 0..cmd.input.timesteps {
            let slice = slice_isovolume(&vol, tau as f64);
            let out = sibling(path, &format!("-slice-{tau:02}"));
            write_vtk_polydata(&slice_mesh_to_polydata(&slice, cmd.out.delta_t), &out)?;
            slice_files += 1;
        }
        if let Some(t0) = cmd.slice_at {
            let slice = slice_isovolume(&vol, t0);
            let out = sibling(path, "-slice-at");
            write_vtk_polydata(&slice_mesh_to_polydata(&slice, cmd.out.delta_t), &out)?;
            slice_files += 1;
        }
    }

    println!("track-isosurface: {}", domain.describe());
    println!(
        "  swept elements: {} pentachora",
        swept_elements(domain.mesh(), 4)
    );
    println!("  detections: {}", vol.detections);
    println!(
        "  isovolume: {} vertices, {} tetrahedra, {} components, {} sliced surfaces",
        vol.vertices.len(),
        vol.tets.len(),
        vol.component_ids.len(),
        slice_files
    );
    print_diagnostics(&vol.diagnostics);
    println!("  wall time: {:.3} s", elapsed.as_secs_f64());
    Ok(())
}

fn exec_synth(cmd: &SynthCmd) -> Result<()> {
    let dtype = Dtype::from_str(&cmd.dtype)?;
    let mut spec = SyntheticSpec::defaults(&cmd.kind)?;
    if let Some(dims) = &cmd.dims {
        spec.dims = dims.clone();
    }
    if let Some(t) = cmd.timesteps {
        spec.timesteps = t;
    }
    if let Some(s) = cmd.seed {
        spec.seed = s;
    }
    if let Some(s) = cmd.sigma {
        spec.sigma = s;
    }
    if let Some(dt) = cmd.delta_t {
        spec.delta_t = dt;
    }
    if let Some(x0) = &cmd.x0 {
        spec.x0 = vec3(x0, "--x0")?;
    }
    if let Some(d) = &cmd.d {
        spec.d = vec3(d, "--d")?;
    }
    if let Some(a) = cmd.alpha {
        spec.alpha = a;
    }
    if spec.timesteps < 1 {
        return Err(Error::Config("--timesteps must be at least 1".into()));
    }

    let start = Instant::now();
    let (field, mesh) = spec.generate()?;
    let files = write_sequence(&cmd.output, &field, dtype)?;
    if let Some(path) = &cmd.output_mesh {
        match &mesh {
            Some(m) => json::write_mesh_json(m, path)?,
            None => {
                return Err(Error::Config(format!(
                    "synthetic kind {:?} is grid-sampled and has no mesh to write",
                    cmd.kind
                )))
            }
        }
    }

    println!("synth: {} ({} layers of {} samples)", spec.kind, field.timesteps(), field.samples_per_layer());
    println!(
        "  wrote {} file(s): {} .. {}",
        files.len(),
        files.first().map(String::as_str).unwrap_or("-"),
        files.last().map(String::as_str).unwrap_or("-")
    );
    if let Some(path) = &cmd.output_mesh {
        println!("  mesh: {}", path.display());
    }
    println!("  wall time: {:.3} s", start.elapsed().as_secs_f64());
    Ok(())
}

fn exec_slice(cmd: &SliceCmd) -> Result<()> {
    let doc = json::read_json(&cmd.input)?;
    let start = Instant::now();
    let params = vec![
        ("input", cmd.input.display().to_string()),
        ("slice-at", cmd.slice_at.to_string()),
        ("delta-t", cmd.out.delta_t.to_string()),
    ];

    match doc.kind.as_str() {
        "critical-trajectories" => {
            let trajectories: Vec<Trajectory> = doc
                .trajectories
                .iter()
                .map(trajectory_from_record)
                .collect::<Result<_>>()?;
            let points = post::slice_trajectories(&trajectories, cmd.slice_at);
            let mut out = FeatureDocument::new("slice-points", provenance("slice", params));
            out.points = points.iter().map(slice_point_to_record).collect();
            if let Some(path) = &cmd.out.output_json {
                json::write_json(&out, path)?;
            }
            if let Some(path) = &cmd.out.output {
                write_vtk_polydata(&slice_points_to_polydata(&points, cmd.out.delta_t), path)?;
            }
            println!("slice: {} points at t = {}", points.len(), cmd.slice_at);
        }
        "isovolume" => {
            let record = doc
                .isovolume
                .as_ref()
                .ok_or_else(|| Error::Config("document is missing its isovolume".into()))?;
            let vol = isovolume_from_record(record);
            let slice = slice_isovolume(&vol, cmd.slice_at);
            let mut out = FeatureDocument::new("isovolume-slices", provenance("slice", params));
            out.slices = vec![slice_mesh_to_record(&slice)];
            if let Some(path) = &cmd.out.output_json {
                json::write_json(&out, path)?;
            }
            if let Some(path) = &cmd.out.output {
                write_vtk_polydata(&slice_mesh_to_polydata(&slice, cmd.out.delta_t), path)?;
            }
            println!(
                "slice: {} vertices, {} triangles at t = {}",
                slice.vertices.len(),
                slice.triangles.len(),
                cmd.slice_at
            );
        }
        "vortex" => {
            // Core curves are reconstructed per time layer at tracking
            // time; slicing serves them back at integral times.
            if cmd.slice_at.fract() != 0.0 {
                return Err(Error::Config(format!(
                    "vortex geometry exists per time layer; --slice-at must be an integer, got {}",
                    cmd.slice_at
                )));
            }
            let layer = cmd.slice_at as i32;
            let records: Vec<_> = doc
                .curves
                .iter()
                .filter(|c| c.layer == layer)
                .cloned()
                .collect();
            let curves = records
                .iter()
                .map(curve_from_record)
                .collect::<Result<Vec<_>>>()?;
            let mut out = FeatureDocument::new("vortex", provenance("slice", params));
            out.curves = records;
            if let Some(path) = &cmd.out.output_json {
                json::write_json(&out, path)?;
            }
            if let Some(path) = &cmd.out.output {
                write_vtk_polydata(&curves_to_polydata(&curves, cmd.out.delta_t), path)?;
            }
            println!("slice: {} curves at layer {layer}", curves.len());
        }
        other => {
            return Err(Error::Config(format!(
                "cannot slice a document of kind {other:?}"
            )))
        }
    }
    println!("  wall time: {:.3} s", start.elapsed().as_secs_f64());
    Ok(())
}
