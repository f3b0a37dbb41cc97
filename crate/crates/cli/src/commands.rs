use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use chiral_ladder_core::{
    scale_emitters, sweep_separation, Channel, Ladder, Peak, SpectrumResult, SystemConfig,
    UniformGrid,
};
use serde::Serialize;

use crate::args::{parse_n_list, Command, ScaleArgs, SpectrumArgs, SweepArgs, ValidateArgs};
use crate::config::{ConfigFile, GridSpec};
use crate::error::CliError;
use crate::output::{self, sibling, write_file};

/// Default detuning window for spectra and scaling runs (Gamma0).
pub const SPECTRUM_GRID: UniformGrid = UniformGrid {
    min: -300.0,
    max: 300.0,
    points: 2001,
};

/// Default detuning window for separation sweeps (Gamma0).
pub const SWEEP_GRID: UniformGrid = UniformGrid {
    min: -40.0,
    max: 40.0,
    points: 201,
};

#[derive(Debug, Serialize)]
pub struct Grids {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detuning: Option<UniformGrid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spacing: Option<UniformGrid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<usize>>,
}

/// Written next to every output. `config` is in config-file form, with the
/// resolved detuning grid, so it can be fed back through `--config`.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: &'static str,
    pub version: &'static str,
    pub config: ConfigFile,
    pub grids: Grids,
    pub refine_peaks: bool,
    pub outputs: Vec<PathBuf>,
    pub wall_clock_seconds: f64,
}

#[derive(Debug, Serialize)]
struct Maximum {
    channel: Channel,
    location: f64,
    height: f64,
}

#[derive(Debug, Serialize)]
struct PeaksReport {
    window: UniformGrid,
    refined: bool,
    maxima: Vec<Maximum>,
    peaks: Vec<Peak>,
}

struct Loaded {
    file: ConfigFile,
    system: SystemConfig,
}

fn load(path: &Path) -> Result<Loaded, CliError> {
    let file = ConfigFile::load(path)?;
    let system = file.to_system()?;
    Ok(Loaded { file, system })
}

fn detuning_grid(
    loaded: &Loaded,
    flags: GridSpec,
    default: UniformGrid,
) -> Result<UniformGrid, CliError> {
    flags
        .or(loaded.file.detuning.unwrap_or_default())
        .resolve(default, "detuning grid")
}

fn snapshot(loaded: &Loaded, detuning: UniformGrid) -> ConfigFile {
    let grid = GridSpec {
        min: Some(detuning.min),
        max: Some(detuning.max),
        points: Some(detuning.points),
    };
    ConfigFile::from_system(&loaded.system, Some(grid))
}

fn check_rows(result: &SpectrumResult) -> Result<(), CliError> {
    match result.first_failure() {
        Some(e) => Err(CliError::solve(*e)),
        None => Ok(()),
    }
}

/// Writes every file, then the manifest naming them.
fn finish(
    primary: &Path,
    files: Vec<(PathBuf, String)>,
    mut manifest: RunManifest,
    started: Instant,
) -> Result<(), CliError> {
    for (path, contents) in &files {
        write_file(path, contents)?;
    }
    manifest.outputs = files.into_iter().map(|(p, _)| p).collect();
    manifest.wall_clock_seconds = started.elapsed().as_secs_f64();
    write_file(&sibling(primary, "manifest.json"), &output::json(&manifest))
}

pub fn spectrum(args: &SpectrumArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let loaded = load(&args.config)?;
    let grid = detuning_grid(&loaded, args.detuning.grid(), SPECTRUM_GRID)?;
    let ladder = Ladder::new(loaded.system.clone())?;
    let mut result = ladder.scan(&grid.values())?;
    check_rows(&result)?;

    let mut peaks = Vec::new();
    let mut maxima = Vec::new();
    for channel in Channel::ALL {
        peaks.extend(ladder.find_peaks(&result, channel, args.refine_peaks)?);
        if let Some((i, height)) = result.argmax(channel) {
            maxima.push(Maximum {
                channel,
                location: result.deltas[i],
                height,
            });
        }
    }
    result.peaks = peaks.clone();
    let report = PeaksReport {
        window: grid,
        refined: args.refine_peaks,
        maxima,
        peaks,
    };

    let files = vec![
        (args.out.clone(), output::spectrum_csv(&result)),
        (sibling(&args.out, "peaks.json"), output::json(&report)),
    ];
    let manifest = RunManifest {
        command: "spectrum",
        version: env!("CARGO_PKG_VERSION"),
        config: snapshot(&loaded, grid),
        grids: Grids {
            detuning: Some(grid),
            spacing: None,
            n_list: None,
        },
        refine_peaks: args.refine_peaks,
        outputs: Vec::new(),
        wall_clock_seconds: 0.0,
    };
    finish(&args.out, files, manifest, started)
}

pub fn sweep(args: &SweepArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let loaded = load(&args.config)?;
    let grid = detuning_grid(&loaded, args.detuning.grid(), SWEEP_GRID)?;
    let spacing = UniformGrid::new(args.l_min, args.l_max, args.l_points)
        .map_err(|e| CliError::Usage(format!("spacing grid: {e}")))?;
    let sweep = sweep_separation(&loaded.system, &spacing.values(), &grid.values())?;
    for (l, column) in sweep.spacings.iter().zip(&sweep.columns) {
        if let Some(e) = column.first_failure() {
            return Err(CliError::Solve {
                delta: e.delta(),
                spacing: Some(*l),
                source: *e,
            });
        }
    }

    let files = vec![(args.out.clone(), output::sweep_csv(&sweep))];
    let manifest = RunManifest {
        command: "sweep-separation",
        version: env!("CARGO_PKG_VERSION"),
        config: snapshot(&loaded, grid),
        grids: Grids {
            detuning: Some(grid),
            spacing: Some(spacing),
            n_list: None,
        },
        refine_peaks: false,
        outputs: Vec::new(),
        wall_clock_seconds: 0.0,
    };
    finish(&args.out, files, manifest, started)
}

pub fn scale_n(args: &ScaleArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let n_list = parse_n_list(&args.n_list)?;
    let loaded = load(&args.config)?;
    let grid = detuning_grid(&loaded, args.detuning.grid(), SPECTRUM_GRID)?;
    let report = scale_emitters(&loaded.system, &n_list, grid)?;

    let files = vec![(args.out.clone(), output::json(&report))];
    let manifest = RunManifest {
        command: "scale-n",
        version: env!("CARGO_PKG_VERSION"),
        config: snapshot(&loaded, grid),
        grids: Grids {
            detuning: Some(grid),
            spacing: None,
            n_list: Some(n_list),
        },
        refine_peaks: true,
        outputs: Vec::new(),
        wall_clock_seconds: 0.0,
    };
    finish(&args.out, files, manifest, started)
}

fn summary(ladder: &Ladder) -> String {
    let v = ladder.config();
    let phases = v.phases();
    let c = v.config();
    let mut s = format!(
        "config: valid\n\
         n_emitters: {}\n\
         chiral: {}\n\
         theta: {:.6} rad ({:.4} pi)\n\
         r_step: {:.6} rad\n\
         ddi_mode: {}\n",
        v.n_emitters(),
        v.is_chiral(),
        phases.theta,
        phases.theta / PI,
        phases.r_step,
        c.ddi_mode.name(),
    );
    if v.n_emitters() >= 2 {
        s += &format!(
            "nearest_neighbor_ddi: {:.4} Gamma0\n",
            ladder.ddi().get(0, 1)
        );
    }
    s
}

pub fn validate(
    args: &ValidateArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let started = Instant::now();
    let loaded = load(&args.config)?;
    let ladder = Ladder::new(loaded.system.clone())?;
    let text = summary(&ladder);
    let console = |w: &mut dyn Write, s: &str| {
        w.write_all(s.as_bytes()).map_err(|source| CliError::Io {
            path: PathBuf::from("<stdout>"),
            source,
        })
    };

    if !args.dump_ddi {
        return console(stdout, &text);
    }
    let csv = output::ddi_csv(ladder.ddi());
    match &args.out {
        None => {
            // Keep stdout a clean CSV stream.
            console(stderr, &text)?;
            console(stdout, &csv)
        }
        Some(out) => {
            console(stdout, &text)?;
            let manifest = RunManifest {
                command: "validate",
                version: env!("CARGO_PKG_VERSION"),
                config: ConfigFile::from_system(&loaded.system, loaded.file.detuning),
                grids: Grids {
                    detuning: None,
                    spacing: None,
                    n_list: None,
                },
                refine_peaks: false,
                outputs: Vec::new(),
                wall_clock_seconds: 0.0,
            };
            finish(out, vec![(out.clone(), csv)], manifest, started)
        }
    }
}

pub fn run(command: &Command) -> Result<(), CliError> {
    match command {
        Command::Spectrum(a) => spectrum(a),
        Command::SweepSeparation(a) => sweep(a),
        Command::ScaleN(a) => scale_n(a),
        Command::Validate(a) => validate(
            a,
            &mut std::io::stdout().lock(),
            &mut std::io::stderr().lock(),
        ),
    }
}
