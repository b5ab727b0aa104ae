//! The 19-dimensional geometric descriptor fed to the object classifiers.
//!
//! Dimensions (3 extents), locations (6 bounds + 3 centroid coordinates),
//! mesh characteristics (area, volume, face and vertex counts) and three
//! dimensionless shape ratios.

use std::fs::File;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::ObjectClass;

pub const FEATURE_COUNT: usize = 19;

/// Denominator floor for the shape ratios of flat or needle-like meshes.
pub const RATIO_EPS: f64 = 1e-9;

pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "extent_x",
    "extent_y",
    "extent_z",
    "min_x",
    "min_y",
    "min_z",
    "max_x",
    "max_y",
    "max_z",
    "centroid_x",
    "centroid_y",
    "centroid_z",
    "surface_area",
    "volume",
    "face_count",
    "vertex_count",
    "extent_ratio_max_min",
    "vertical_ratio",
    "aabb_fill",
];

/// Indices of the features that do not move with the object.
pub const SHAPE_FEATURES: [usize; 10] = [0, 1, 2, 12, 13, 14, 15, 16, 17, 18];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: [f64; FEATURE_COUNT],
    /// Set when a zero extent forced a ratio denominator up to [`RATIO_EPS`].
    #[serde(default)]
    pub degenerate: bool,
}

impl FeatureVector {
    pub fn get(&self, name: &str) -> Option<f64> {
        FEATURE_NAMES
            .iter()
            .position(|n| *n == name)
            .map(|i| self.values[i])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }
}

pub fn extract_features(mesh: &Mesh) -> FeatureVector {
    let bounds = mesh.aabb();
    let ext = bounds.extents();
    let centroid = mesh.vertex_centroid();
    let area = mesh.surface_area();
    let volume = mesh.volume();

    let mut degenerate = false;
    let mut clamp = |d: f64| {
        if d < RATIO_EPS {
            degenerate = true;
            RATIO_EPS
        } else {
            d
        }
    };
    let max_ext = ext.x.max(ext.y).max(ext.z);
    let min_ext = ext.x.min(ext.y).min(ext.z);
    let extent_ratio = max_ext / clamp(min_ext);
    let vertical_ratio = ext.z / clamp(ext.x.max(ext.y));
    let aabb_fill = volume / clamp(ext.x * ext.y * ext.z);

    FeatureVector {
        values: [
            ext.x,
            ext.y,
            ext.z,
            bounds.min.x,
            bounds.min.y,
            bounds.min.z,
            bounds.max.x,
            bounds.max.y,
            bounds.max.z,
            centroid.x,
            centroid.y,
            centroid.z,
            area,
            volume,
            mesh.triangle_count() as f64,
            mesh.vertex_count() as f64,
            extent_ratio,
            vertical_ratio,
            aabb_fill,
        ],
        degenerate,
    }
}

/// One row of the tabular dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub id: String,
    pub label: Option<ObjectClass>,
    pub features: FeatureVector,
}

fn header() -> Vec<&'static str> {
    let mut h = vec!["id", "label"];
    h.extend(FEATURE_NAMES);
    h
}

pub fn features_to_csv(rows: &[FeatureRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_features_csv(rows, file)
}

pub fn write_features_csv<W: std::io::Write>(rows: &[FeatureRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header())?;
    for row in rows {
        let mut rec = vec![
            row.id.clone(),
            row.label.map(|c| c.as_str().to_owned()).unwrap_or_default(),
        ];
        rec.extend(row.features.values.iter().map(|v| v.to_string()));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::Dataset(e.to_string()))?;
    Ok(())
}

pub fn features_from_csv(path: impl AsRef<Path>) -> Result<Vec<FeatureRow>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_features_csv(file)
}

pub fn read_features_csv<R: std::io::Read>(input: R) -> Result<Vec<FeatureRow>> {
    let mut r = csv::Reader::from_reader(input);
    let got: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if got != header() {
        return Err(Error::Dataset(format!("unexpected CSV header {got:?}")));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let label = match rec.get(1).unwrap_or("") {
            "" => None,
            s => Some(s.parse::<ObjectClass>()?),
        };
        let mut values = [0.0f64; FEATURE_COUNT];
        for (k, v) in values.iter_mut().enumerate() {
            let field = rec.get(k + 2).unwrap_or("");
            *v = field
                .parse()
                .map_err(|_| Error::Dataset(format!("bad {} value '{field}'", FEATURE_NAMES[k])))?;
            if !v.is_finite() {
                return Err(Error::Dataset(format!("non-finite {}", FEATURE_NAMES[k])));
            }
        }
        rows.push(FeatureRow {
            id: rec.get(0).unwrap_or("").to_owned(),
            label,
            features: FeatureVector {
                values,
                degenerate: false,
            },
        });
    }
    Ok(rows)
}
