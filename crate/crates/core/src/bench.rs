//! Noise-sweep benchmarks: corrupt, denoise, score, and serialize.
//!
//! Records come out variance-major, then seed, then method, so the CSV for a
//! given configuration is byte-for-byte reproducible. Timing is opt-in because
//! wall-clock numbers are the one thing that would break that.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::filter::{
    default_h, denoise, FilterParams, Method, PatchDistance, DEFAULT_PATCH_SIZE,
    DEFAULT_SEARCH_SIZE,
};
use crate::image::Image;
use crate::metrics::{extract_profile, psnr};
use crate::noise::{add_speckle, NoiseDistribution, NoiseSpec};
use crate::pgm::load_pgm;
use crate::synth::{generate_checker, generate_step_edge};

/// Clean image the sweep starts from.
#[derive(Debug, Clone, PartialEq)]
pub enum ImageSource {
    Checker { size: usize, square: usize },
    Edge { width: usize, height: usize },
    File(PathBuf),
}

impl ImageSource {
    pub fn default_checker() -> Self {
        ImageSource::Checker {
            size: 256,
            square: 32,
        }
    }

    pub fn id(&self) -> String {
        match self {
            ImageSource::Checker { .. } => "checker".into(),
            ImageSource::Edge { .. } => "edge".into(),
            ImageSource::File(path) => path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string()),
        }
    }

    pub fn load(&self) -> Result<Image<f64>> {
        match self {
            ImageSource::Checker { size, square } => {
                generate_checker(*size, *size, *square, 0.0, 1.0)
            }
            ImageSource::Edge { width, height } => generate_step_edge(*width, *height, 0.0, 1.0),
            ImageSource::File(path) => load_pgm(path),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub variances: Vec<f64>,
    pub seeds: Vec<u64>,
    pub methods: Vec<Method>,
    pub source: ImageSource,
    pub s: usize,
    pub r: usize,
    /// Fixed smoothing parameter; `None` derives it from each variance.
    pub h: Option<f64>,
    pub distance: PatchDistance,
    pub distribution: NoiseDistribution,
    /// Measure wall-clock time of each denoise call.
    pub timing: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            variances: (1..=10).map(|k| k as f64 / 100.0).collect(),
            seeds: vec![1],
            methods: Method::ALL.to_vec(),
            source: ImageSource::default_checker(),
            s: DEFAULT_SEARCH_SIZE,
            r: DEFAULT_PATCH_SIZE,
            h: None,
            distance: PatchDistance::default(),
            distribution: NoiseDistribution::Uniform,
            timing: false,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.variances.is_empty() || self.seeds.is_empty() || self.methods.is_empty() {
            return Err(Error::InvalidParameter(
                "variances, seeds and methods must all be non-empty".into(),
            ));
        }
        for &v in &self.variances {
            NoiseSpec::new(v, 0)?;
        }
        self.params_for(self.variances[0], self.methods[0])?;
        Ok(())
    }

    pub fn params_for(&self, variance: f64, method: Method) -> Result<FilterParams<f64>> {
        let h = match self.h {
            Some(h) => h,
            None => default_h(variance)?,
        };
        Ok(FilterParams::new(self.s, self.r, h, method)?.with_distance(self.distance))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub image_id: String,
    pub method: Method,
    pub variance: f64,
    pub seed: u64,
    pub psnr_db: f64,
    pub wall_ms: Option<f64>,
}

/// Runs every (variance, seed, method) combination.
pub fn run_sweep(cfg: &BenchConfig) -> Result<Vec<BenchRecord>> {
    cfg.validate()?;
    let clean = cfg.source.load()?;
    let image_id = cfg.source.id();
    let mut records = Vec::with_capacity(cfg.variances.len() * cfg.seeds.len() * cfg.methods.len());
    for &variance in &cfg.variances {
        for &seed in &cfg.seeds {
            let spec = NoiseSpec::new(variance, seed)?.with_distribution(cfg.distribution);
            let noisy = add_speckle(&clean, &spec);
            for &method in &cfg.methods {
                let params = cfg.params_for(variance, method)?;
                let start = Instant::now();
                let denoised = denoise(&noisy, &params);
                let elapsed = start.elapsed();
                records.push(BenchRecord {
                    image_id: image_id.clone(),
                    method,
                    variance,
                    seed,
                    psnr_db: psnr(&clean, &denoised)?,
                    wall_ms: cfg.timing.then_some(elapsed.as_secs_f64() * 1e3),
                });
            }
        }
    }
    Ok(records)
}

/// `%g`-style formatting with `digits` significant digits.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        format!(
            "{}e{}{:02}",
            trim_zeros(mantissa),
            if exp < 0 { '-' } else { '+' },
            exp.abs()
        )
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Two-decimal label, as used on plot axes.
pub fn format_psnr(db: f64) -> String {
    if db.is_infinite() && db > 0.0 {
        "inf".into()
    } else {
        format!("{db:.2}")
    }
}

fn format_psnr_field(db: f64) -> String {
    if db.is_infinite() && db > 0.0 {
        "inf".into()
    } else {
        format_significant(db, 6)
    }
}

pub const CSV_HEADER: &str = "image,method,variance,seed,psnr_db,wall_ms";

pub fn records_to_csv(records: &[BenchRecord]) -> String {
    let mut out = String::with_capacity(32 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for rec in records {
        let wall = rec
            .wall_ms
            .map(|ms| format_significant(ms, 6))
            .unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{}",
            rec.image_id,
            rec.method,
            format_significant(rec.variance, 6),
            rec.seed,
            format_psnr_field(rec.psnr_db),
            wall
        )
        .expect("writing to a String");
    }
    out
}

/// Mean PSNR over seeds for one method at one variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPoint {
    pub method: Method,
    pub variance: f64,
    pub mean_psnr_db: f64,
}

/// Averages records over seeds, ordered by method then variance.
pub fn summarize(records: &[BenchRecord]) -> Vec<SeriesPoint> {
    let mut keys: Vec<(Method, f64)> = Vec::new();
    for rec in records {
        if !keys
            .iter()
            .any(|&(m, v)| m == rec.method && v == rec.variance)
        {
            keys.push((rec.method, rec.variance));
        }
    }
    keys.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    keys.into_iter()
        .map(|(method, variance)| {
            let vals: Vec<f64> = records
                .iter()
                .filter(|r| r.method == method && r.variance == variance)
                .map(|r| r.psnr_db)
                .collect();
            SeriesPoint {
                method,
                variance,
                mean_psnr_db: vals.iter().sum::<f64>() / vals.len() as f64,
            }
        })
        .collect()
}

pub fn mean_psnr(points: &[SeriesPoint], method: Method, variance: f64) -> Option<f64> {
    points
        .iter()
        .find(|p| p.method == method && (p.variance - variance).abs() < 1e-12)
        .map(|p| p.mean_psnr_db)
}

/// Static PSNR-vs-variance line chart, one polyline per method.
pub fn render_svg(records: &[BenchRecord]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const PAD: f64 = 50.0;
    const COLORS: [&str; 3] = ["#1f77b4", "#ff7f0e", "#2ca02c"];

    let points: Vec<SeriesPoint> = summarize(records)
        .into_iter()
        .filter(|p| p.mean_psnr_db.is_finite())
        .collect();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in &points {
        x0 = x0.min(p.variance);
        x1 = x1.max(p.variance);
        y0 = y0.min(p.mean_psnr_db);
        y1 = y1.max(p.mean_psnr_db);
    }
    if points.is_empty() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    let span = |lo: f64, hi: f64| if hi > lo { hi - lo } else { 1.0 };
    let sx = |v: f64| PAD + (v - x0) / span(x0, x1) * (W - 2.0 * PAD);
    let sy = |v: f64| H - PAD - (v - y0) / span(y0, y1) * (H - 2.0 * PAD);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<path d="M{PAD} {top} V{bottom} H{right}" fill="none" stroke="black"/>"#,
        top = PAD,
        bottom = H - PAD,
        right = W - PAD
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">noise variance</text>"#,
        W / 2.0,
        H - 12.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="14" y="{}" font-size="12" transform="rotate(-90 14 {})" text-anchor="middle">PSNR (dB)</text>"#,
        H / 2.0,
        H / 2.0
    );
    for (value, label_y) in [(y0, sy(y0)), (y1, sy(y1))] {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{:.1}" font-size="10" text-anchor="end">{}</text>"#,
            PAD - 4.0,
            label_y,
            format_psnr(value)
        );
    }
    for (value, label_x) in [(x0, sx(x0)), (x1, sx(x1))] {
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{}" font-size="10" text-anchor="middle">{}</text>"#,
            label_x,
            H - PAD + 14.0,
            format_significant(value, 6)
        );
    }
    for (k, method) in Method::ALL.iter().enumerate() {
        let series: Vec<String> = points
            .iter()
            .filter(|p| p.method == *method)
            .map(|p| format!("{:.2},{:.2}", sx(p.variance), sy(p.mean_psnr_db)))
            .collect();
        if series.is_empty() {
            continue;
        }
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{}" stroke-width="2" points="{}"/>"#,
            COLORS[k],
            series.join(" ")
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="12" fill="{}">{}</text>"#,
            W - PAD - 60.0,
            PAD + 16.0 * k as f64,
            COLORS[k],
            method
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Scanline comparison: clean vs. noisy vs. each method's output.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileTable {
    pub positions: Vec<usize>,
    pub clean: Vec<f64>,
    pub noisy: Vec<f64>,
    pub denoised: Vec<(Method, Vec<f64>)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileConfig {
    pub source: ImageSource,
    pub variance: f64,
    pub seed: u64,
    pub row: usize,
    pub methods: Vec<Method>,
    pub s: usize,
    pub r: usize,
    pub h: Option<f64>,
    pub distance: PatchDistance,
    pub distribution: NoiseDistribution,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        Self {
            source: ImageSource::Edge {
                width: 64,
                height: 64,
            },
            variance: 0.08,
            seed: 1,
            row: 32,
            methods: Method::ALL.to_vec(),
            s: DEFAULT_SEARCH_SIZE,
            r: DEFAULT_PATCH_SIZE,
            h: None,
            distance: PatchDistance::default(),
            distribution: NoiseDistribution::Uniform,
        }
    }
}

pub fn run_profile(cfg: &ProfileConfig) -> Result<ProfileTable> {
    let clean = cfg.source.load()?;
    let clean_row = extract_profile(&clean, cfg.row)?;
    let noisy = add_speckle(
        &clean,
        &NoiseSpec::new(cfg.variance, cfg.seed)?.with_distribution(cfg.distribution),
    );
    let h = match cfg.h {
        Some(h) => h,
        None => default_h(cfg.variance)?,
    };
    let denoised = cfg
        .methods
        .iter()
        .map(|&m| {
            let params = FilterParams::new(cfg.s, cfg.r, h, m)?.with_distance(cfg.distance);
            Ok((
                m,
                extract_profile(&denoise(&noisy, &params), cfg.row)?.amplitudes,
            ))
        })
        .collect::<Result<_>>()?;
    Ok(ProfileTable {
        positions: clean_row.positions,
        clean: clean_row.amplitudes,
        noisy: extract_profile(&noisy, cfg.row)?.amplitudes,
        denoised,
    })
}

pub fn profile_to_csv(table: &ProfileTable) -> String {
    let mut out = String::from("position,clean,noisy");
    for (m, _) in &table.denoised {
        out.push(',');
        out.push_str(m.name());
    }
    out.push('\n');
    for (k, pos) in table.positions.iter().enumerate() {
        let _ = write!(
            out,
            "{pos},{},{}",
            format_significant(table.clean[k], 6),
            format_significant(table.noisy[k], 6)
        );
        for (_, values) in &table.denoised {
            let _ = write!(out, ",{}", format_significant(values[k], 6));
        }
        out.push('\n');
    }
    out
}
