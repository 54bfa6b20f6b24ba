//! Output bundles: CSV artifacts, config echo, plot scripts and manifest.
//!
//! Every numeric CSV field is written with 17 significant digits. Files are
//! tracked while written; if anything fails the partial files are removed.
//! A lock file guards the directory against concurrent runs.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use roguewave_core::experiment::detrended_oscillation;
use roguewave_core::stats::ks_histograms;
use roguewave_core::{expected_intensity, fourier_coeffs, Histogram, SweepResult};
use serde::Serialize;

use crate::error::{CliError, Result};

const LOCK_NAME: &str = ".roguewave.lock";

#[derive(Debug, Clone)]
pub struct OutputBundle {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
}

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn rho_tag(rho: f64) -> String {
    format!("{rho}")
}

struct BundleWriter {
    dir: PathBuf,
    lock: PathBuf,
    written: Vec<PathBuf>,
    committed: bool,
}

impl BundleWriter {
    fn open(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let lock = dir.join(LOCK_NAME);
        fs::OpenOptions::new()
            .write(true)
            .create_new(true)
            .open(&lock)
            .map_err(|e| match e.kind() {
                std::io::ErrorKind::AlreadyExists => CliError::io(
                    &lock,
                    std::io::Error::new(e.kind(), "output directory is locked by another run"),
                ),
                _ => CliError::io(&lock, e),
            })?;
        Ok(BundleWriter {
            dir: dir.to_path_buf(),
            lock,
            written: Vec::new(),
            committed: false,
        })
    }

    fn write(&mut self, name: &str, contents: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        self.written.push(path);
        Ok(())
    }

    fn write_csv(&mut self, name: &str, header: &[&str], rows: Vec<Vec<String>>) -> Result<()> {
        let path = self.dir.join(name);
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| CliError::io(&path, std::io::Error::other(e));
        w.write_record(header).map_err(csv_err)?;
        for row in rows {
            w.write_record(&row).map_err(csv_err)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| CliError::io(&path, std::io::Error::other(e.to_string())))?;
        self.write(name, &bytes)
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| CliError::Data(format!("serializing {name}: {e}")))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    fn commit(mut self) -> OutputBundle {
        self.committed = true;
        OutputBundle {
            dir: self.dir.clone(),
            files: std::mem::take(&mut self.written),
        }
    }
}

impl Drop for BundleWriter {
    fn drop(&mut self) {
        if !self.committed {
            for f in &self.written {
                let _ = fs::remove_file(f);
            }
        }
        let _ = fs::remove_file(&self.lock);
    }
}

fn histogram_rows(h: &Histogram, prefix: &[String]) -> Vec<Vec<String>> {
    let density = h.density();
    (0..h.counts.len())
        .map(|k| {
            let mut row = prefix.to_vec();
            row.extend([
                num(h.edges[k]),
                num(h.edges[k + 1]),
                h.counts[k].to_string(),
                num(density[k]),
            ]);
            row
        })
        .collect()
}

#[derive(Serialize)]
struct Manifest<'a> {
    version: &'a str,
    master_seed: u64,
    timestamp_unix: u64,
    invocation: &'a [String],
    /// Re-running this command reproduces every CSV byte for byte.
    rerun: Vec<String>,
    files: Vec<String>,
}

fn manifest(
    w: &mut BundleWriter,
    seed: u64,
    invocation: &[String],
    rerun: Vec<String>,
) -> Result<()> {
    let timestamp_unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let files = w
        .written
        .iter()
        .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
        .collect();
    let m = Manifest {
        version: roguewave_core::VERSION,
        master_seed: seed,
        timestamp_unix,
        invocation,
        rerun,
        files,
    };
    w.json("manifest.json", &m)
}

fn write_sweep_files(w: &mut BundleWriter, result: &SweepResult) -> Result<()> {
    let cfg = &result.config;
    w.json("config.json", cfg)?;
    let (a, b) = fourier_coeffs(&cfg.dist);

    let mut eta_rows = Vec::new();
    let mut summary_rows = Vec::new();
    for r in &result.per_rho {
        let tag = rho_tag(r.rho);
        w.write_csv(
            &format!("pdf_rho_{tag}.csv"),
            &["bin_lo", "bin_hi", "count", "density"],
            histogram_rows(&r.histogram, &[]),
        )?;
        let curve_rows = result
            .betas
            .iter()
            .zip(&r.mean_curve)
            .zip(&r.std_error)
            .map(|((&beta, &m), &se)| {
                vec![
                    num(beta),
                    num(m),
                    num(se),
                    num(expected_intensity(beta, cfg.n_waves, a, b, cfg.e0)),
                ]
            })
            .collect();
        w.write_csv(
            &format!("mean_intensity_{tag}.csv"),
            &["beta", "mean", "std_error", "analytic_iid"],
            curve_rows,
        )?;
        let m = &r.metrics;
        eta_rows.push(vec![
            num(r.rho),
            num(m.eta),
            m.eta_base.map(num).unwrap_or_default(),
            num(m.i_max),
            num(m.mean),
            num(m.sigma),
        ]);
        summary_rows.push(vec![
            num(r.rho),
            r.histogram.total.to_string(),
            r.histogram.underflow.to_string(),
            r.histogram.overflow.to_string(),
            num(r.pooled.mean),
            num(detrended_oscillation(&r.mean_curve, &result.betas, cfg.n_waves, cfg.e0)),
        ]);
    }
    w.write_csv(
        "eta_table.csv",
        &["rho", "eta", "eta_base", "i_max", "mean", "sigma"],
        eta_rows,
    )?;
    w.write_csv(
        "histogram_summary.csv",
        &["rho", "total", "underflow", "overflow", "normalization", "curve_oscillation"],
        summary_rows,
    )?;
    w.write("plot_pdf.py", PLOT_PDF.as_bytes())?;
    w.write("plot_mean_intensity.py", PLOT_MEAN.as_bytes())?;
    Ok(())
}

fn rerun_command(sub: &str, dir: &Path, extra: &[String]) -> Vec<String> {
    let mut v = vec![
        "roguewave".to_string(),
        sub.to_string(),
        "--config".to_string(),
        dir.join("config.json").display().to_string(),
        "--out".to_string(),
        dir.display().to_string(),
    ];
    v.extend_from_slice(extra);
    v
}

/// Writes the artifacts of one sweep into `dir`.
pub fn write_sweep_bundle(dir: &Path, result: &SweepResult, invocation: &[String]) -> Result<OutputBundle> {
    let mut w = BundleWriter::open(dir)?;
    write_sweep_files(&mut w, result)?;
    let rerun = rerun_command("sweep", dir, &[]);
    manifest(&mut w, result.config.master_seed, invocation, rerun)?;
    Ok(w.commit())
}

/// Writes one `nbeta_pdf_<N_β>.csv` per partition plus pairwise KS
/// distances against the finest partition. A single-entry study also gets
/// the full sweep artifacts.
pub fn write_nbeta_bundle(dir: &Path, results: &[SweepResult], invocation: &[String]) -> Result<OutputBundle> {
    let first = results
        .first()
        .ok_or_else(|| CliError::Usage("empty n_beta list".into()))?;
    let mut w = BundleWriter::open(dir)?;
    if results.len() == 1 {
        write_sweep_files(&mut w, first)?;
    } else {
        w.json("config.json", &first.config)?;
    }
    for res in results {
        let mut rows = Vec::new();
        for r in &res.per_rho {
            rows.extend(histogram_rows(&r.histogram, &[num(r.rho)]));
        }
        w.write_csv(
            &format!("nbeta_pdf_{}.csv", res.config.n_beta),
            &["rho", "bin_lo", "bin_hi", "count", "density"],
            rows,
        )?;
    }
    let finest = results
        .iter()
        .max_by_key(|r| r.config.n_beta)
        .expect("non-empty");
    let mut ks_rows = Vec::new();
    for res in results {
        for (r, f) in res.per_rho.iter().zip(&finest.per_rho) {
            let d = ks_histograms(&r.histogram, &f.histogram)?;
            ks_rows.push(vec![
                num(r.rho),
                res.config.n_beta.to_string(),
                finest.config.n_beta.to_string(),
                num(d),
            ]);
        }
    }
    w.write_csv(
        "nbeta_ks.csv",
        &["rho", "n_beta", "n_beta_ref", "ks_at_edges"],
        ks_rows,
    )?;
    w.write("plot_nbeta.py", PLOT_NBETA.as_bytes())?;
    let list = results
        .iter()
        .map(|r| r.config.n_beta.to_string())
        .collect::<Vec<_>>()
        .join(",");
    let rerun = rerun_command("nbeta", dir, &["--n-beta-list".to_string(), list]);
    manifest(&mut w, first.config.master_seed, invocation, rerun)?;
    Ok(w.commit())
}

const PLOT_PDF: &str = r#"# Overlay of the pooled intensity PDFs on a mono-log scale.
import csv, glob, os, sys
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
files = sorted(glob.glob(os.path.join(here, "pdf_rho_*.csv")), key=lambda p: float(p.rsplit("_", 1)[1][:-4]))
for path in files:
    rho = path.rsplit("_", 1)[1][:-4]
    xs, ys = [], []
    with open(path) as f:
        for row in csv.DictReader(f):
            d = float(row["density"])
            if d > 0:
                xs.append(0.5 * (float(row["bin_lo"]) + float(row["bin_hi"])))
                ys.append(d)
    plt.semilogy(xs, ys, ".-", label=f"rho = {rho}")
plt.xlabel("I / <I>")
plt.ylabel("P(I / <I>)")
plt.legend()
plt.savefig(os.path.join(here, "pdf.png"), dpi=150)
if "--show" in sys.argv:
    plt.show()
"#;

const PLOT_MEAN: &str = r#"# <I>(beta) for every rho, with the independent-phase analytic curve.
import csv, glob, os, sys
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
files = sorted(glob.glob(os.path.join(here, "mean_intensity_*.csv")), key=lambda p: float(p.rsplit("_", 1)[1][:-4]))
for i, path in enumerate(files):
    rho = path.rsplit("_", 1)[1][:-4]
    rows = list(csv.DictReader(open(path)))
    beta = [float(r["beta"]) for r in rows]
    plt.plot(beta, [float(r["mean"]) for r in rows], label=f"rho = {rho}")
    if i == 0:
        plt.plot(beta, [float(r["analytic_iid"]) for r in rows], "k--", label="analytic, independent phases")
plt.xlabel("beta")
plt.ylabel("<I>")
plt.legend()
plt.savefig(os.path.join(here, "mean_intensity.png"), dpi=150)
if "--show" in sys.argv:
    plt.show()
"#;

const PLOT_NBETA: &str = r#"# Pooled PDFs for each beta partition size, one panel per rho.
import csv, glob, os, sys
from collections import defaultdict
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
curves = defaultdict(dict)
for path in glob.glob(os.path.join(here, "nbeta_pdf_*.csv")):
    nb = int(path.rsplit("_", 1)[1][:-4])
    for row in csv.DictReader(open(path)):
        d = float(row["density"])
        if d > 0:
            x = 0.5 * (float(row["bin_lo"]) + float(row["bin_hi"]))
            curves[row["rho"]].setdefault(nb, ([], []))
            curves[row["rho"]][nb][0].append(x)
            curves[row["rho"]][nb][1].append(d)
fig, axes = plt.subplots(1, len(curves), squeeze=False, figsize=(5 * len(curves), 4))
for ax, (rho, per_nb) in zip(axes[0], sorted(curves.items(), key=lambda kv: float(kv[0]))):
    for nb in sorted(per_nb):
        ax.semilogy(*per_nb[nb], ".-", label=f"N_beta = {nb}")
    ax.set_title(f"rho = {float(rho):g}")
    ax.set_xlabel("I / <I>")
    ax.legend()
fig.savefig(os.path.join(here, "nbeta_pdf.png"), dpi=150)
if "--show" in sys.argv:
    plt.show()
"#;
