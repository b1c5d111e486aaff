use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{fingerprint, Fingerprint, LrpLayout, Point2, Pose, QuantizedFingerprint, Room, NUM_TYPES};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LutEntry {
    pub x: f64,
    pub y: f64,
    /// Fine-grid positions that share this key.
    pub count: usize,
}

impl LutEntry {
    pub fn position(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }
}

/// Quantized fingerprint → representative position.
#[derive(Debug, Clone, PartialEq)]
pub struct LookupTable {
    pub bin_width: f64,
    pub type_counts: [usize; NUM_TYPES],
    pub entries: BTreeMap<Vec<u32>, LutEntry>,
}

#[derive(Serialize, Deserialize)]
struct FileEntry {
    key: Vec<u32>,
    x: f64,
    y: f64,
    count: usize,
}

#[derive(Serialize, Deserialize)]
struct LutFile {
    bin_width: f64,
    type_counts: [usize; NUM_TYPES],
    entries: Vec<FileEntry>,
}

/// Cell-centred sample coordinates covering `[0, extent]` at roughly `step`.
fn cell_centers(extent: f64, step: f64) -> Vec<f64> {
    let n = ((extent / step).round() as usize).max(1);
    let h = extent / n as f64;
    (0..n).map(|i| (i as f64 + 0.5) * h).collect()
}

impl LookupTable {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &QuantizedFingerprint) -> Option<&LutEntry> {
        self.entries.get(&key.key())
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = LutFile {
            bin_width: self.bin_width,
            type_counts: self.type_counts,
            entries: self
                .entries
                .iter()
                .map(|(k, e)| FileEntry {
                    key: k.clone(),
                    x: e.x,
                    y: e.y,
                    count: e.count,
                })
                .collect(),
        };
        let w = std::io::BufWriter::new(std::fs::File::create(path)?);
        serde_json::to_writer(w, &file)?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let de = &mut serde_json::Deserializer::from_str(&text);
        let file: LutFile = serde_path_to_error::deserialize(de)
            .map_err(|e| Error::config(format!("{}: {}", path.display(), e.path()), e.inner().to_string()))?;
        let n = file.type_counts.iter().sum::<usize>();
        let mut entries = BTreeMap::new();
        for (i, e) in file.entries.into_iter().enumerate() {
            if e.key.len() != n {
                return Err(Error::config(
                    format!("{}: entries[{i}].key", path.display()),
                    format!("expected {n} bins, got {}", e.key.len()),
                ));
            }
            entries.insert(e.key, LutEntry { x: e.x, y: e.y, count: e.count });
        }
        Ok(Self {
            bin_width: file.bin_width,
            type_counts: file.type_counts,
            entries,
        })
    }
}

/// Sweeps a cell-centred grid of pitch `fine_step` over the room, groups
/// positions by quantized fingerprint and stores each group's centroid.
///
/// Groups need not be convex or even connected. When a centroid falls
/// outside its own group, the member closest to the centroid is stored
/// instead, so every entry maps back to its own key.
pub fn build_lut(layout: &LrpLayout, room: &Room, bin_width: f64, fine_step: f64) -> Result<LookupTable> {
    layout.validate()?;
    room.validate()?;
    if !(bin_width > 0.0) {
        return Err(Error::InvalidArgument(format!("bin width must be > 0, got {bin_width}")));
    }
    if !(fine_step > 0.0 && fine_step <= 0.5 * bin_width) {
        return Err(Error::InvalidArgument(format!(
            "fine step must be in (0, bin_width / 2], got {fine_step} for bin width {bin_width}"
        )));
    }
    let xs = cell_centers(room.width, fine_step);
    let ys = cell_centers(room.depth, fine_step);
    let key_at = |x: f64, y: f64| fingerprint(layout, &Pose::new(x, y, 0.0)).quantize(bin_width).key();

    let mut groups: BTreeMap<Vec<u32>, (f64, f64, usize)> = BTreeMap::new();
    for &y in &ys {
        for &x in &xs {
            let g = groups.entry(key_at(x, y)).or_insert((0.0, 0.0, 0));
            g.0 += x;
            g.1 += y;
            g.2 += 1;
        }
    }
    let mut entries: BTreeMap<Vec<u32>, LutEntry> = groups
        .into_iter()
        .map(|(k, (sx, sy, n))| {
            let c = n as f64;
            (k, LutEntry { x: sx / c, y: sy / c, count: n })
        })
        .collect();

    // key -> (centroid, best distance so far, nearest member)
    let mut stray: BTreeMap<Vec<u32>, (Point2, f64, Point2)> = entries
        .iter()
        .filter(|(k, e)| key_at(e.x, e.y) != **k)
        .map(|(k, e)| (k.clone(), (e.position(), f64::INFINITY, e.position())))
        .collect();
    if !stray.is_empty() {
        for &y in &ys {
            for &x in &xs {
                if let Some((c, best, at)) = stray.get_mut(&key_at(x, y)) {
                    let d = c.distance(Point2::new(x, y));
                    if d < *best {
                        *best = d;
                        *at = Point2::new(x, y);
                    }
                }
            }
        }
        for (k, (_, _, at)) in stray {
            let e = entries.get_mut(&k).expect("stray keys come from the table");
            e.x = at.x;
            e.y = at.y;
        }
    }
    Ok(LookupTable {
        bin_width,
        type_counts: layout.type_counts(),
        entries,
    })
}

/// Position stored for `fp`: the exact bin if present, otherwise the entry
/// whose bin-centre fingerprint is nearest in Euclidean distance, ties going
/// to the smaller key.
pub fn lut_lookup(table: &LookupTable, fp: &Fingerprint) -> Result<Point2> {
    if table.is_empty() {
        return Err(Error::EmptyTable);
    }
    if fp.type_counts() != table.type_counts {
        return Err(Error::CardinalityMismatch {
            expected: table.type_counts.iter().sum(),
            got: fp.len(),
        });
    }
    if let Some(e) = table.get(&fp.quantize(table.bin_width)) {
        return Ok(e.position());
    }
    let v = fp.to_vector();
    let mut best: Option<(f64, &LutEntry)> = None;
    for (key, e) in &table.entries {
        let d2: f64 = key
            .iter()
            .zip(&v)
            .map(|(&k, &d)| ((f64::from(k) + 0.5) * table.bin_width - d).powi(2))
            .sum();
        if best.is_none_or(|(b, _)| d2 < b) {
            best = Some((d2, e));
        }
    }
    Ok(best.expect("table is not empty").1.position())
}
