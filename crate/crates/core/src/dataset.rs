//! Observation records: CSV ingestion with unit checks, temporal
//! nearest-neighbor imputation, and 3-sigma outlier removal.
//!
//! Column schema (header is bit-exact, optional fields are empty strings):
//!
//! ```text
//! date,time,utc_offset_min,lat,lon,alt_m,air_temp_C,rh_pct,wind_ms,svf,
//! pct_trees,pct_buildings,pct_impervious,shade,S_up,S_down,S_n,S_e,S_s,S_w,
//! L_up,L_down,L_n,L_e,L_s,L_w,tmrt_C,image_id
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{CoreError, Result};
use crate::radiation::{DirectionalFluxes, LONGWAVE_MEASURED_BAND};
use crate::solar::GeoTime;

pub const CSV_HEADER: [&str; 28] = [
    "date",
    "time",
    "utc_offset_min",
    "lat",
    "lon",
    "alt_m",
    "air_temp_C",
    "rh_pct",
    "wind_ms",
    "svf",
    "pct_trees",
    "pct_buildings",
    "pct_impervious",
    "shade",
    "S_up",
    "S_down",
    "S_n",
    "S_e",
    "S_s",
    "S_w",
    "L_up",
    "L_down",
    "L_n",
    "L_e",
    "L_s",
    "L_w",
    "tmrt_C",
    "image_id",
];

/// One MaRTy-style observation. Optional sensor fields may be missing
/// before imputation.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationRecord {
    pub geo: GeoTime,
    pub air_temp_c: Option<f64>,
    pub rh_pct: Option<f64>,
    pub wind_ms: Option<f64>,
    pub svf_meta: Option<f64>,
    pub pct_trees: Option<f64>,
    pub pct_buildings: Option<f64>,
    pub pct_impervious: Option<f64>,
    /// true = shaded at measurement time.
    pub shade_measured: Option<bool>,
    /// Shortwave flux per direction, canonical order up/down/n/e/s/w.
    pub shortwave: [Option<f64>; 6],
    pub longwave: [Option<f64>; 6],
    pub tmrt_c: Option<f64>,
    pub image_id: Option<String>,
}

impl ObservationRecord {
    /// Complete six-directional fluxes when all twelve components exist.
    pub fn fluxes(&self) -> Option<DirectionalFluxes> {
        let mut s = [0.0; 6];
        let mut l = [0.0; 6];
        for i in 0..6 {
            s[i] = self.shortwave[i]?;
            l[i] = self.longwave[i]?;
        }
        Some(DirectionalFluxes {
            shortwave: s,
            longwave: l,
        })
    }

    /// The twelve flux labels in model order (shortwave then longwave).
    pub fn flux_labels(&self) -> [Option<f64>; 12] {
        let mut out = [None; 12];
        out[..6].copy_from_slice(&self.shortwave);
        out[6..].copy_from_slice(&self.longwave);
        out
    }

    fn day_key(&self) -> (i32, u32, u32) {
        (self.geo.year, self.geo.month, self.geo.day)
    }

    /// Minutes since local midnight, used as the imputation distance.
    fn time_min(&self) -> f64 {
        self.geo.local_minutes()
    }
}

/// Numeric sensor fields subject to imputation and outlier removal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    AirTemp,
    Rh,
    Wind,
    SvfMeta,
    PctTrees,
    PctBuildings,
    PctImpervious,
    Shortwave(usize),
    Longwave(usize),
    Tmrt,
}

impl Field {
    /// Fields filled by temporal nearest-neighbor imputation. The
    /// measured T_mrt label is never imputed.
    pub const IMPUTABLE: [Field; 19] = [
        Field::AirTemp,
        Field::Rh,
        Field::Wind,
        Field::SvfMeta,
        Field::PctTrees,
        Field::PctBuildings,
        Field::PctImpervious,
        Field::Shortwave(0),
        Field::Shortwave(1),
        Field::Shortwave(2),
        Field::Shortwave(3),
        Field::Shortwave(4),
        Field::Shortwave(5),
        Field::Longwave(0),
        Field::Longwave(1),
        Field::Longwave(2),
        Field::Longwave(3),
        Field::Longwave(4),
        Field::Longwave(5),
    ];

    /// Sensor fields screened by the 3-sigma rule.
    pub const OUTLIER_SCREENED: [Field; 16] = [
        Field::AirTemp,
        Field::Rh,
        Field::Wind,
        Field::Shortwave(0),
        Field::Shortwave(1),
        Field::Shortwave(2),
        Field::Shortwave(3),
        Field::Shortwave(4),
        Field::Shortwave(5),
        Field::Longwave(0),
        Field::Longwave(1),
        Field::Longwave(2),
        Field::Longwave(3),
        Field::Longwave(4),
        Field::Longwave(5),
        Field::Tmrt,
    ];

    pub fn name(self) -> &'static str {
        const S_NAMES: [&str; 6] = ["S_up", "S_down", "S_n", "S_e", "S_s", "S_w"];
        const L_NAMES: [&str; 6] = ["L_up", "L_down", "L_n", "L_e", "L_s", "L_w"];
        match self {
            Field::AirTemp => "air_temp_C",
            Field::Rh => "rh_pct",
            Field::Wind => "wind_ms",
            Field::SvfMeta => "svf",
            Field::PctTrees => "pct_trees",
            Field::PctBuildings => "pct_buildings",
            Field::PctImpervious => "pct_impervious",
            Field::Shortwave(i) => S_NAMES[i],
            Field::Longwave(i) => L_NAMES[i],
            Field::Tmrt => "tmrt_C",
        }
    }

    pub fn get(self, r: &ObservationRecord) -> Option<f64> {
        match self {
            Field::AirTemp => r.air_temp_c,
            Field::Rh => r.rh_pct,
            Field::Wind => r.wind_ms,
            Field::SvfMeta => r.svf_meta,
            Field::PctTrees => r.pct_trees,
            Field::PctBuildings => r.pct_buildings,
            Field::PctImpervious => r.pct_impervious,
            Field::Shortwave(i) => r.shortwave[i],
            Field::Longwave(i) => r.longwave[i],
            Field::Tmrt => r.tmrt_c,
        }
    }

    pub fn set(self, r: &mut ObservationRecord, v: f64) {
        match self {
            Field::AirTemp => r.air_temp_c = Some(v),
            Field::Rh => r.rh_pct = Some(v),
            Field::Wind => r.wind_ms = Some(v),
            Field::SvfMeta => r.svf_meta = Some(v),
            Field::PctTrees => r.pct_trees = Some(v),
            Field::PctBuildings => r.pct_buildings = Some(v),
            Field::PctImpervious => r.pct_impervious = Some(v),
            Field::Shortwave(i) => r.shortwave[i] = Some(v),
            Field::Longwave(i) => r.longwave[i] = Some(v),
            Field::Tmrt => r.tmrt_c = Some(v),
        }
    }
}

/// An ordered record collection plus the directory its images live in.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub records: Vec<ObservationRecord>,
    pub image_dir: Option<PathBuf>,
}

/// One rejected or flagged row.
#[derive(Debug, Clone)]
pub struct RowIssue {
    /// 1-based data row number (header not counted).
    pub row: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct IngestReport {
    pub n_accepted: usize,
    pub rejected: Vec<RowIssue>,
    pub tmrt_min: Option<f64>,
    pub tmrt_max: Option<f64>,
}

fn parse_opt_f64(s: &str, row: usize, col: &str) -> Result<Option<f64>> {
    let t = s.trim();
    if t.is_empty() {
        return Ok(None);
    }
    t.parse::<f64>().map(Some).map_err(|_| CoreError::Row {
        row,
        reason: format!("column `{col}`: unparseable value `{t}`"),
    })
}

fn parse_req_f64(s: &str, row: usize, col: &str) -> Result<f64> {
    parse_opt_f64(s, row, col)?.ok_or_else(|| CoreError::Row {
        row,
        reason: format!("column `{col}`: required value missing"),
    })
}

fn check_range(v: Option<f64>, lo: f64, hi: f64, row: usize, col: &str) -> Result<()> {
    if let Some(x) = v {
        if !x.is_finite() || x < lo || x > hi {
            return Err(CoreError::Row {
                row,
                reason: format!("column `{col}`: value {x} outside [{lo}, {hi}]"),
            });
        }
    }
    Ok(())
}

fn parse_row(rec: &csv::StringRecord, row: usize) -> Result<ObservationRecord> {
    let field = |i: usize| rec.get(i).unwrap_or("");
    let date = field(0).trim();
    let time = field(1).trim();
    let utc_offset: i32 = field(2).trim().parse().map_err(|_| CoreError::Row {
        row,
        reason: format!("column `utc_offset_min`: unparseable value `{}`", field(2)),
    })?;
    let lat = parse_req_f64(field(3), row, "lat")?;
    let lon = parse_req_f64(field(4), row, "lon")?;
    let alt_m = parse_req_f64(field(5), row, "alt_m")?;
    let geo = GeoTime::parse(lat, lon, alt_m, date, time, utc_offset).map_err(|e| {
        CoreError::Row {
            row,
            reason: e.to_string(),
        }
    })?;

    let air_temp_c = parse_opt_f64(field(6), row, "air_temp_C")?;
    let rh_pct = parse_opt_f64(field(7), row, "rh_pct")?;
    let wind_ms = parse_opt_f64(field(8), row, "wind_ms")?;
    let svf_meta = parse_opt_f64(field(9), row, "svf")?;
    let pct_trees = parse_opt_f64(field(10), row, "pct_trees")?;
    let pct_buildings = parse_opt_f64(field(11), row, "pct_buildings")?;
    let pct_impervious = parse_opt_f64(field(12), row, "pct_impervious")?;
    let shade_measured = match field(13).trim() {
        "" => None,
        "1" | "true" => Some(true),
        "0" | "false" => Some(false),
        other => {
            return Err(CoreError::Row {
                row,
                reason: format!("column `shade`: expected 0/1, got `{other}`"),
            })
        }
    };
    let mut shortwave = [None; 6];
    let mut longwave = [None; 6];
    for i in 0..6 {
        shortwave[i] = parse_opt_f64(field(14 + i), row, CSV_HEADER[14 + i])?;
        longwave[i] = parse_opt_f64(field(20 + i), row, CSV_HEADER[20 + i])?;
    }
    let tmrt_c = parse_opt_f64(field(26), row, "tmrt_C")?;
    let image_id = {
        let t = field(27).trim();
        if t.is_empty() {
            None
        } else {
            Some(t.to_string())
        }
    };

    check_range(air_temp_c, -40.0, 60.0, row, "air_temp_C")?;
    check_range(rh_pct, 0.0, 100.0, row, "rh_pct")?;
    check_range(wind_ms, 0.0, f64::INFINITY, row, "wind_ms")?;
    check_range(svf_meta, 0.0, 1.0, row, "svf")?;
    check_range(pct_trees, 0.0, 100.0, row, "pct_trees")?;
    check_range(pct_buildings, 0.0, 100.0, row, "pct_buildings")?;
    check_range(pct_impervious, 0.0, 100.0, row, "pct_impervious")?;
    check_range(tmrt_c, -40.0, 100.0, row, "tmrt_C")?;
    for i in 0..6 {
        check_range(shortwave[i], 0.0, f64::INFINITY, row, CSV_HEADER[14 + i])?;
        check_range(
            longwave[i],
            LONGWAVE_MEASURED_BAND.0,
            LONGWAVE_MEASURED_BAND.1,
            row,
            CSV_HEADER[20 + i],
        )?;
    }

    Ok(ObservationRecord {
        geo,
        air_temp_c,
        rh_pct,
        wind_ms,
        svf_meta,
        pct_trees,
        pct_buildings,
        pct_impervious,
        shade_measured,
        shortwave,
        longwave,
        tmrt_c,
        image_id,
    })
}

/// Parses a records CSV. Rows violating hard invariants are rejected and
/// reported, not fatal; a malformed header is fatal.
pub fn ingest_csv(path: &Path, image_dir: Option<&Path>) -> Result<(Dataset, IngestReport)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path)?;
    let headers = reader.headers()?.clone();
    if headers.len() != CSV_HEADER.len() {
        return Err(CoreError::Schema(format!(
            "expected {} columns, found {}",
            CSV_HEADER.len(),
            headers.len()
        )));
    }
    for (i, want) in CSV_HEADER.iter().enumerate() {
        let got = headers.get(i).unwrap_or("");
        if got != *want {
            return Err(CoreError::Schema(format!(
                "column {i}: expected `{want}`, found `{got}`"
            )));
        }
    }

    let mut records = Vec::new();
    let mut report = IngestReport::default();
    for (idx, row) in reader.records().enumerate() {
        let row_no = idx + 1;
        let rec = row?;
        match parse_row(&rec, row_no) {
            Ok(r) => {
                if let Some(t) = r.tmrt_c {
                    report.tmrt_min = Some(report.tmrt_min.map_or(t, |m: f64| m.min(t)));
                    report.tmrt_max = Some(report.tmrt_max.map_or(t, |m: f64| m.max(t)));
                }
                records.push(r);
            }
            Err(e) => report.rejected.push(RowIssue {
                row: row_no,
                reason: e.to_string(),
            }),
        }
    }
    report.n_accepted = records.len();
    Ok((
        Dataset {
            records,
            image_dir: image_dir.map(Path::to_path_buf),
        },
        report,
    ))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

fn fmt_time(geo: &GeoTime) -> String {
    let mut s = format!("{:02}:{:02}:", geo.hour, geo.minute);
    if geo.second.fract() == 0.0 {
        let _ = write!(s, "{:02}", geo.second as u32);
    } else {
        let whole = geo.second.trunc() as u32;
        let frac = format!("{}", geo.second - geo.second.trunc());
        let _ = write!(s, "{:02}.{}", whole, &frac[2..]);
    }
    s
}

/// Serializes records using the canonical header and float formatting
/// (shortest round-trip representation).
pub fn write_csv(ds: &Dataset, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(CSV_HEADER)?;
    for r in &ds.records {
        let g = &r.geo;
        let mut fields: Vec<String> = vec![
            format!("{:04}-{:02}-{:02}", g.year, g.month, g.day),
            fmt_time(g),
            format!("{}", g.utc_offset_min),
            format!("{}", g.latitude),
            format!("{}", g.longitude),
            format!("{}", g.altitude_m),
            fmt_opt(r.air_temp_c),
            fmt_opt(r.rh_pct),
            fmt_opt(r.wind_ms),
            fmt_opt(r.svf_meta),
            fmt_opt(r.pct_trees),
            fmt_opt(r.pct_buildings),
            fmt_opt(r.pct_impervious),
            r.shade_measured
                .map(|b| if b { "1" } else { "0" }.to_string())
                .unwrap_or_default(),
        ];
        for i in 0..6 {
            fields.push(fmt_opt(r.shortwave[i]));
        }
        for i in 0..6 {
            fields.push(fmt_opt(r.longwave[i]));
        }
        fields.push(fmt_opt(r.tmrt_c));
        fields.push(r.image_id.clone().unwrap_or_default());
        w.write_record(&fields)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Default)]
pub struct ImputeReport {
    pub imputed: usize,
    /// Largest |time gap| in minutes across all imputations.
    pub max_gap_min: f64,
    pub per_field: Vec<(&'static str, usize)>,
}

/// Fills missing numeric sensor fields from the temporally nearest record
/// of the same campaign day; ties break toward the earlier record. The
/// measured T_mrt is never imputed. Fails when a needed field is missing
/// in every record of a day.
pub fn impute_missing(ds: &Dataset) -> Result<(Dataset, ImputeReport)> {
    let mut out = ds.clone();
    let mut report = ImputeReport::default();

    let mut days: BTreeMap<(i32, u32, u32), Vec<usize>> = BTreeMap::new();
    for (i, r) in ds.records.iter().enumerate() {
        days.entry(r.day_key()).or_default().push(i);
    }

    let mut per_field: BTreeMap<&'static str, usize> = BTreeMap::new();
    for (day, members) in &days {
        for field in Field::IMPUTABLE {
            let donors: Vec<usize> = members
                .iter()
                .copied()
                .filter(|&i| field.get(&ds.records[i]).is_some())
                .collect();
            for &i in members {
                if field.get(&ds.records[i]).is_some() {
                    continue;
                }
                if donors.is_empty() {
                    return Err(CoreError::UnimputableField {
                        field: field.name(),
                        day: format!("{:04}-{:02}-{:02}", day.0, day.1, day.2),
                    });
                }
                let t_i = ds.records[i].time_min();
                let mut best: Option<(f64, f64, usize)> = None; // (|gap|, donor time, idx)
                for &j in &donors {
                    let t_j = ds.records[j].time_min();
                    let gap = (t_j - t_i).abs();
                    let better = match best {
                        None => true,
                        Some((bg, bt, _)) => gap < bg || (gap == bg && t_j < bt),
                    };
                    if better {
                        best = Some((gap, t_j, j));
                    }
                }
                let (gap, _, j) = best.expect("donors nonempty");
                let v = field.get(&ds.records[j]).expect("donor has value");
                field.set(&mut out.records[i], v);
                report.imputed += 1;
                report.max_gap_min = report.max_gap_min.max(gap);
                *per_field.entry(field.name()).or_default() += 1;
            }
        }
    }
    report.per_field = per_field.into_iter().collect();
    Ok((out, report))
}

#[derive(Debug, Clone, Default)]
pub struct OutlierReport {
    /// (input row index, field that triggered the drop)
    pub dropped: Vec<(usize, &'static str)>,
}

/// Drops records farther than 3 population standard deviations from the
/// per-field mean. Applied once, not iteratively. Fields with zero
/// variance drop nothing; datasets of fewer than 10 records are returned
/// unchanged.
pub fn remove_outliers(ds: &Dataset) -> (Dataset, OutlierReport) {
    let n = ds.records.len();
    let mut report = OutlierReport::default();
    if n < 10 {
        return (ds.clone(), report);
    }

    let mut drop = vec![false; n];
    for field in Field::OUTLIER_SCREENED {
        let values: Vec<(usize, f64)> = ds
            .records
            .iter()
            .enumerate()
            .filter_map(|(i, r)| field.get(r).map(|v| (i, v)))
            .collect();
        if values.len() < 2 {
            continue;
        }
        let m = values.iter().map(|(_, v)| v).sum::<f64>() / values.len() as f64;
        let var =
            values.iter().map(|(_, v)| (v - m) * (v - m)).sum::<f64>() / values.len() as f64;
        let sd = var.sqrt();
        if sd == 0.0 {
            continue;
        }
        for &(i, v) in &values {
            if (v - m).abs() > 3.0 * sd && !drop[i] {
                drop[i] = true;
                report.dropped.push((i, field.name()));
            }
        }
    }
    let records = ds
        .records
        .iter()
        .enumerate()
        .filter(|(i, _)| !drop[*i])
        .map(|(_, r)| r.clone())
        .collect();
    (
        Dataset {
            records,
            image_dir: ds.image_dir.clone(),
        },
        report,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_record(minute: u32) -> ObservationRecord {
        ObservationRecord {
            geo: GeoTime::new(
                33.4255, -111.94, 360.0, 2018, 6, 21, 12, minute, 0.0, -420,
            )
            .unwrap(),
            air_temp_c: Some(35.0),
            rh_pct: Some(20.0),
            wind_ms: Some(2.0),
            svf_meta: Some(0.8),
            pct_trees: Some(5.0),
            pct_buildings: Some(20.0),
            pct_impervious: Some(90.0),
            shade_measured: Some(false),
            shortwave: [Some(800.0), Some(160.0), Some(200.0), Some(220.0), Some(210.0), Some(190.0)],
            longwave: [Some(400.0), Some(520.0), Some(470.0), Some(465.0), Some(468.0), Some(462.0)],
            tmrt_c: Some(55.0),
            image_id: Some(format!("img{minute:02}")),
        }
    }

    fn make_dataset(n: usize) -> Dataset {
        Dataset {
            records: (0..n).map(|i| base_record(i as u32)).collect(),
            image_dir: None,
        }
    }

    #[test]
    fn round_trip_is_lossless() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("golden.csv");
        let mut ds = make_dataset(3);
        ds.records[1].wind_ms = None;
        ds.records[2].image_id = None;
        ds.records[2].tmrt_c = Some(55.123456789012);
        write_csv(&ds, &path).unwrap();
        let (ds2, report) = ingest_csv(&path, None).unwrap();
        assert!(report.rejected.is_empty());
        assert_eq!(ds.records, ds2.records);

        // second round trip
        let path2 = dir.path().join("again.csv");
        write_csv(&ds2, &path2).unwrap();
        let (ds3, _) = ingest_csv(&path2, None).unwrap();
        assert_eq!(ds2.records, ds3.records);
    }

    #[test]
    fn out_of_range_row_rejected_with_diagnostics() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        let mut ds = make_dataset(3);
        ds.records[1].air_temp_c = Some(999.0);
        write_csv(&ds, &path).unwrap();
        let (ds2, report) = ingest_csv(&path, None).unwrap();
        assert_eq!(ds2.records.len(), 2);
        assert_eq!(report.rejected.len(), 1);
        assert_eq!(report.rejected[0].row, 2);
        assert!(report.rejected[0].reason.contains("air_temp_C"));
    }

    #[test]
    fn header_mismatch_is_schema_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("schema.csv");
        std::fs::write(&path, "definitely,not,the,schema\n1,2,3,4\n").unwrap();
        assert!(matches!(
            ingest_csv(&path, None),
            Err(CoreError::Schema(_))
        ));
    }

    #[test]
    fn impute_takes_nearest_neighbor() {
        let mut ds = make_dataset(0);
        let mut a = base_record(0); // 12:00, wind 2.0
        a.wind_ms = Some(2.0);
        let mut b = base_record(5); // 12:05, wind missing
        b.wind_ms = None;
        let mut c = base_record(20); // 12:20, wind 4.0
        c.wind_ms = Some(4.0);
        ds.records = vec![a, b, c];
        let (out, report) = impute_missing(&ds).unwrap();
        assert_eq!(out.records[1].wind_ms, Some(2.0));
        assert_eq!(report.imputed, 1);
        assert_eq!(report.max_gap_min, 5.0);
    }

    #[test]
    fn impute_tie_breaks_to_earlier_record() {
        let mut ds = make_dataset(0);
        let mut a = base_record(0); // 12:00, wind 2.0
        a.wind_ms = Some(2.0);
        let mut b = base_record(5); // 12:05, missing
        b.wind_ms = None;
        let mut c = base_record(10); // 12:10, wind 4.0
        c.wind_ms = Some(4.0);
        ds.records = vec![a, b, c];
        let (out, _) = impute_missing(&ds).unwrap();
        assert_eq!(out.records[1].wind_ms, Some(2.0));
    }

    #[test]
    fn impute_never_touches_present_values_or_tmrt() {
        let mut ds = make_dataset(5);
        ds.records[2].tmrt_c = None;
        ds.records[3].rh_pct = None;
        let (out, _) = impute_missing(&ds).unwrap();
        assert_eq!(out.records[2].tmrt_c, None, "tmrt must not be imputed");
        assert_eq!(out.records[3].rh_pct, Some(20.0));
        for (a, b) in ds.records.iter().zip(&out.records) {
            if a.rh_pct.is_some() {
                assert_eq!(a.rh_pct, b.rh_pct);
            }
        }
    }

    #[test]
    fn impute_fails_when_field_absent_all_day() {
        let mut ds = make_dataset(3);
        for r in &mut ds.records {
            r.wind_ms = None;
        }
        match impute_missing(&ds) {
            Err(CoreError::UnimputableField { field, day }) => {
                assert_eq!(field, "wind_ms");
                assert_eq!(day, "2018-06-21");
            }
            other => panic!("expected UnimputableField, got {other:?}"),
        }
    }

    #[test]
    fn outlier_removal_drops_constructed_outlier() {
        let mut ds = make_dataset(20);
        // gentle spread so sigma is nonzero
        for (i, r) in ds.records.iter_mut().enumerate() {
            r.air_temp_c = Some(35.0 + (i % 5) as f64 * 0.1);
        }
        let values: Vec<f64> = ds.records.iter().map(|r| r.air_temp_c.unwrap()).collect();
        let m = values.iter().sum::<f64>() / values.len() as f64;
        let sd = (values.iter().map(|v| (v - m) * (v - m)).sum::<f64>()
            / values.len() as f64)
            .sqrt();
        ds.records[7].air_temp_c = Some(m + 5.0 * sd * 10.0);
        let (out, report) = remove_outliers(&ds);
        assert_eq!(out.records.len(), 19);
        assert_eq!(report.dropped.len(), 1);
        assert_eq!(report.dropped[0].0, 7);
        assert_eq!(report.dropped[0].1, "air_temp_C");
    }

    #[test]
    fn identical_values_drop_nothing() {
        let ds = make_dataset(15);
        let (out, report) = remove_outliers(&ds);
        assert_eq!(out.records.len(), 15);
        assert!(report.dropped.is_empty());
    }

    #[test]
    fn outlier_removal_idempotent_on_fixture() {
        let mut ds = make_dataset(30);
        for (i, r) in ds.records.iter_mut().enumerate() {
            r.air_temp_c = Some(30.0 + (i as f64 * 0.37).sin() * 3.0);
            r.wind_ms = Some(2.0 + (i as f64 * 0.73).cos());
        }
        ds.records[11].wind_ms = Some(60.0);
        ds.records[21].air_temp_c = Some(58.0);
        let (once, r1) = remove_outliers(&ds);
        assert_eq!(r1.dropped.len(), 2);
        let (twice, r2) = remove_outliers(&once);
        assert_eq!(once.records.len(), twice.records.len());
        assert!(r2.dropped.is_empty(), "second pass dropped {:?}", r2.dropped);
    }
}
