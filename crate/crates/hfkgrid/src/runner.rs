//! Command implementations behind the CLI: grid loading, result caching,
//! page dumps, and parallel batch runs.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::complex::FilteredComplexF2;
use crate::grid::{GridDiagram, GridError, DEFAULT_SIZE_CAP};
use crate::invariants::{self, InvariantError, KnotInvariantSet, SCHEMA_VERSION};
use crate::obstruct::{self, ObstructionMode, ObstructionReport, Verdict};
use crate::spectral;

pub const ENV_CACHE_DIR: &str = "HFKGRID_CACHE_DIR";
const DEFAULT_CACHE_DIR: &str = ".hfkgrid-cache";

/// Exit-code contract: 0 success / not obstructed, 1 batch had failures,
/// 2 parse error, 3 size cap exceeded, 4 internal invariant failure,
/// 10 obstructed.
#[derive(Debug, Error)]
pub enum RunnerError {
    #[error("{path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: GridError,
    },
    #[error("{path}: {n} exceeds the size cap {cap} (raise with --cap)")]
    CapExceeded { path: String, n: usize, cap: usize },
    #[error("internal invariant failure: {0}")]
    Internal(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("result document {path} has schema version {found}, expected {expected}")]
    SchemaMismatch {
        path: String,
        found: u32,
        expected: u32,
    },
    #[error("obstruct mode {0:?} needs exactly {1} input(s)")]
    BadArguments(ObstructionMode, usize),
}

impl RunnerError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunnerError::Parse { .. } | RunnerError::BadArguments(..) => 2,
            RunnerError::CapExceeded { .. } => 3,
            RunnerError::Internal(_) => 4,
            RunnerError::Io { .. } | RunnerError::SchemaMismatch { .. } => 2,
        }
    }
}

fn classify(path: &Path, err: InvariantError) -> RunnerError {
    match err {
        InvariantError::Grid(GridError::CapExceeded { n, cap })
        | InvariantError::Complex(crate::complex::ComplexError::Grid(GridError::CapExceeded {
            n,
            cap,
        })) => RunnerError::CapExceeded {
            path: path.display().to_string(),
            n,
            cap,
        },
        InvariantError::Grid(g) => RunnerError::Parse {
            path: path.display().to_string(),
            source: g,
        },
        other => RunnerError::Internal(other.to_string()),
    }
}

pub struct ComputeOptions {
    pub cap: usize,
    pub no_cache: bool,
    pub cache_dir: Option<PathBuf>,
}

impl Default for ComputeOptions {
    fn default() -> Self {
        Self {
            cap: DEFAULT_SIZE_CAP,
            no_cache: false,
            cache_dir: None,
        }
    }
}

/// A directory of result documents keyed by grid hash. Hits are returned
/// byte for byte; entries with a stale schema version are recomputed.
pub struct ResultCache {
    dir: PathBuf,
}

impl ResultCache {
    pub fn new(dir: PathBuf) -> Self {
        Self { dir }
    }

    /// Resolve the cache directory: explicit override, then the
    /// `HFKGRID_CACHE_DIR` environment variable, then `.hfkgrid-cache`.
    pub fn resolve(explicit: Option<PathBuf>) -> Self {
        let dir = explicit
            .or_else(|| std::env::var_os(ENV_CACHE_DIR).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR));
        Self::new(dir)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn entry_path(&self, hash: &str) -> PathBuf {
        self.dir.join(format!("{hash}.json"))
    }

    /// The cached document bytes, when present with the current schema.
    pub fn lookup(&self, hash: &str) -> Option<Vec<u8>> {
        let path = self.entry_path(hash);
        let bytes = fs::read(&path).ok()?;
        #[derive(serde::Deserialize)]
        struct Probe {
            schema_version: u32,
        }
        let probe: Probe = serde_json::from_slice(&bytes).ok()?;
        (probe.schema_version == SCHEMA_VERSION).then_some(bytes)
    }

    pub fn store(&self, hash: &str, bytes: &[u8]) -> std::io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let mut f = fs::File::create(self.entry_path(hash))?;
        f.write_all(bytes)
    }
}

/// Canonical byte serialization of a result document.
pub fn document_bytes(set: &KnotInvariantSet) -> Vec<u8> {
    let mut bytes = serde_json::to_vec(set).expect("serializable");
    bytes.push(b'\n');
    bytes
}

pub fn load_grid(path: &Path) -> Result<GridDiagram, RunnerError> {
    let text = fs::read_to_string(path).map_err(|source| RunnerError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut grid = GridDiagram::parse(&text).map_err(|source| RunnerError::Parse {
        path: path.display().to_string(),
        source,
    })?;
    if grid.name().is_none() {
        if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
            grid.set_name(stem);
        }
    }
    Ok(grid)
}

/// Compute (or fetch) the invariant document for one grid file. Returns the
/// document bytes and whether they came from the cache.
pub fn cmd_compute(
    grid_path: &Path,
    out_path: Option<&Path>,
    opts: &ComputeOptions,
) -> Result<(Vec<u8>, bool), RunnerError> {
    let grid = load_grid(grid_path)?;
    let cache = ResultCache::resolve(opts.cache_dir.clone());
    let hash = grid.grid_hash();
    let (bytes, cached) = if !opts.no_cache {
        match cache.lookup(&hash) {
            Some(bytes) => (bytes, true),
            None => {
                let set =
                    invariants::compute_all(&grid, opts.cap).map_err(|e| classify(grid_path, e))?;
                let bytes = document_bytes(&set);
                cache
                    .store(&hash, &bytes)
                    .map_err(|source| RunnerError::Io {
                        path: cache.dir.display().to_string(),
                        source,
                    })?;
                (bytes, false)
            }
        }
    } else {
        let set = invariants::compute_all(&grid, opts.cap).map_err(|e| classify(grid_path, e))?;
        (document_bytes(&set), false)
    };
    if let Some(out) = out_path {
        fs::write(out, &bytes).map_err(|source| RunnerError::Io {
            path: out.display().to_string(),
            source,
        })?;
    }
    Ok((bytes, cached))
}

fn set_from_bytes(path: &Path, bytes: &[u8]) -> Result<KnotInvariantSet, RunnerError> {
    let set: KnotInvariantSet = serde_json::from_slice(bytes).map_err(|e| RunnerError::Io {
        path: path.display().to_string(),
        source: std::io::Error::new(std::io::ErrorKind::InvalidData, e),
    })?;
    if set.schema_version != SCHEMA_VERSION {
        return Err(RunnerError::SchemaMismatch {
            path: path.display().to_string(),
            found: set.schema_version,
            expected: SCHEMA_VERSION,
        });
    }
    Ok(set)
}

/// Load an invariant set from either a result document (`.json`) or a grid
/// file computed on the fly.
pub fn load_invariants(
    path: &Path,
    opts: &ComputeOptions,
) -> Result<KnotInvariantSet, RunnerError> {
    if path.extension().and_then(|e| e.to_str()) == Some("json") {
        let bytes = fs::read(path).map_err(|source| RunnerError::Io {
            path: path.display().to_string(),
            source,
        })?;
        set_from_bytes(path, &bytes)
    } else {
        let (bytes, _) = cmd_compute(path, None, opts)?;
        set_from_bytes(path, &bytes)
    }
}

/// Run one of the obstruction modes. `to` is required except in doubly-slice
/// mode, which tests a single knot against the built-in unknot table.
pub fn cmd_obstruct(
    from: &Path,
    to: Option<&Path>,
    mode: ObstructionMode,
    opts: &ComputeOptions,
) -> Result<ObstructionReport, RunnerError> {
    let report = match mode {
        ObstructionMode::DoublySlice => {
            if to.is_some() {
                return Err(RunnerError::BadArguments(mode, 1));
            }
            let k = load_invariants(from, opts)?;
            obstruct::doubly_slice_obstruction(&k)
        }
        ObstructionMode::Invertible | ObstructionMode::Concordance => {
            let Some(to) = to else {
                return Err(RunnerError::BadArguments(mode, 2));
            };
            let k0 = load_invariants(from, opts)?;
            let k1 = load_invariants(to, opts)?;
            match mode {
                ObstructionMode::Invertible => obstruct::invertible_obstruction(&k0, &k1),
                _ => obstruct::concordance_obstruction(&k0, &k1),
            }
        }
    };
    Ok(report)
}

pub fn obstruct_exit_code(report: &ObstructionReport) -> i32 {
    match report.verdict {
        Verdict::Obstructed => 10,
        Verdict::NotObstructed => 0,
    }
}

/// Text dump of the page tower: one `r p m dim` line per nonzero cell,
/// through stabilization (or `max_page`), followed by a tau line.
///
/// Small complexes run the literal page tower; larger ones fall back to the
/// adapted-decomposition dimensions, which the test suite pins to the tower.
pub fn cmd_pages(
    grid_path: &Path,
    max_page: Option<usize>,
    opts: &ComputeOptions,
) -> Result<String, RunnerError> {
    const LITERAL_STATE_LIMIT: usize = 1000;
    let grid = load_grid(grid_path)?;
    let filtered = FilteredComplexF2::build_filtered(&grid, opts.cap)
        .map_err(|e| classify(grid_path, InvariantError::Complex(e)))?;
    let mut out = String::new();
    let tau = spectral::tau(&filtered).map_err(|e| RunnerError::Internal(e.to_string()))?;
    if filtered.dim() <= LITERAL_STATE_LIMIT {
        let pages = spectral::compute_pages(&filtered, max_page)
            .map_err(|e| RunnerError::Internal(e.to_string()))?;
        let last = pages
            .stabilization_page()
            .unwrap_or(pages.max_page())
            .min(pages.max_page());
        for r in 0..=last {
            let page = pages.page(r).unwrap();
            for (&(p, m), &d) in &page.dims() {
                out.push_str(&format!("{r} {p} {m} {d}\n"));
            }
        }
        if let Some(stab) = pages.stabilization_page() {
            out.push_str(&format!("# stabilization page: {stab}\n"));
        }
    } else {
        let tower = spectral::page_dims_tower(&filtered);
        let final_dims = tower.last().expect("tower is nonempty").clone();
        let stab = (1..tower.len()).find(|&r| tower[r] == final_dims);
        let last = max_page.map_or(tower.len() - 1, |m| m.min(tower.len() - 1));
        for (r, dims) in tower.iter().enumerate().take(last + 1) {
            for (&(p, m), &d) in dims {
                out.push_str(&format!("{r} {p} {m} {d}\n"));
            }
        }
        if let Some(stab) = stab {
            out.push_str(&format!("# stabilization page: {stab}\n"));
        }
    }
    out.push_str(&format!("# tau: {tau}\n"));
    Ok(out)
}

/// The Alexander polynomial via the state-sum oracle; `check` reruns it
/// through the homology pipeline and insists the two agree.
pub fn cmd_poly(
    grid_path: &Path,
    check: bool,
    opts: &ComputeOptions,
) -> Result<String, RunnerError> {
    let grid = load_grid(grid_path)?;
    let poly = invariants::euler_oracle(&grid, opts.cap).map_err(|e| classify(grid_path, e))?;
    if check {
        let set = invariants::compute_all(&grid, opts.cap).map_err(|e| classify(grid_path, e))?;
        if set.alexander != poly {
            return Err(RunnerError::Internal(
                "state-sum and homology Alexander polynomials disagree".to_string(),
            ));
        }
    }
    Ok(poly.to_string())
}

pub struct BatchOutcome {
    /// Result documents in name order.
    pub results: Vec<KnotInvariantSet>,
    /// Per-file failures, in path order.
    pub errors: Vec<(PathBuf, String)>,
    pub summary_tsv: String,
}

/// Compute every `.grd` file in a directory, in parallel, writing one
/// result document per input next to the summary. Output ordering is by
/// name regardless of scheduling.
pub fn cmd_batch(
    dir: &Path,
    jobs: Option<usize>,
    out_dir: Option<&Path>,
    opts: &ComputeOptions,
) -> Result<BatchOutcome, RunnerError> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|source| RunnerError::Io {
            path: dir.display().to_string(),
            source,
        })?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().and_then(|e| e.to_str()) == Some("grd"))
        .collect();
    files.sort();

    let run = || -> Vec<(PathBuf, Result<Vec<u8>, RunnerError>)> {
        files
            .par_iter()
            .map(|path| {
                (
                    path.clone(),
                    cmd_compute(path, None, opts).map(|(bytes, _)| bytes),
                )
            })
            .collect()
    };
    let outcomes = match jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map_err(|e| RunnerError::Internal(e.to_string()))?
            .install(run),
        None => run(),
    };

    let mut results = Vec::new();
    let mut errors = Vec::new();
    for (path, outcome) in outcomes {
        match outcome {
            Ok(bytes) => {
                let set = set_from_bytes(&path, &bytes)?;
                if let Some(out) = out_dir {
                    fs::create_dir_all(out).map_err(|source| RunnerError::Io {
                        path: out.display().to_string(),
                        source,
                    })?;
                    let stem = path
                        .file_stem()
                        .and_then(|s| s.to_str())
                        .unwrap_or("result");
                    fs::write(out.join(format!("{stem}.json")), &bytes).map_err(|source| {
                        RunnerError::Io {
                            path: out.display().to_string(),
                            source,
                        }
                    })?;
                }
                results.push(set);
            }
            Err(e) => errors.push((path, e.to_string())),
        }
    }
    results.sort_by(|a, b| a.name.cmp(&b.name));

    let mut summary_tsv = String::from("name\tn\tgenus\ttau\tfibred\tdelta\ttotal_hfk_dim\n");
    for set in &results {
        summary_tsv.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            set.name,
            set.n,
            set.genus,
            set.tau,
            set.fibred,
            set.alexander,
            set.total_hfk_dim()
        ));
    }
    Ok(BatchOutcome {
        results,
        errors,
        summary_tsv,
    })
}
