//! Solar geometry against the 200-row reference table
//! (fixtures/solar_oracle.csv, generated by tools/gen_solar_oracle.py from
//! an independent ephemeris-fit algorithm).

use mrtforge_core::solar::{solar_position, sunrise_local_minutes, GeoTime};

struct OracleRow {
    gt: GeoTime,
    exp_alt: f64,
    exp_az: f64,
    exp_sunrise_local_min: Option<f64>,
}

fn load_oracle() -> Vec<OracleRow> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/solar_oracle.csv");
    let mut rows = Vec::new();
    let mut reader = csv::Reader::from_path(path).expect("oracle fixture present");
    for rec in reader.records() {
        let rec = rec.unwrap();
        let lat: f64 = rec[0].parse().unwrap();
        let lon: f64 = rec[1].parse().unwrap();
        let alt_m: f64 = rec[2].parse().unwrap();
        let date = &rec[3];
        let time = &rec[4];
        let off: i32 = rec[5].parse().unwrap();
        let gt = GeoTime::parse(lat, lon, alt_m, date, time, off).unwrap();
        rows.push(OracleRow {
            gt,
            exp_alt: rec[6].parse().unwrap(),
            exp_az: rec[7].parse().unwrap(),
            exp_sunrise_local_min: if rec[8].is_empty() {
                None
            } else {
                Some(rec[8].parse().unwrap())
            },
        });
    }
    rows
}

#[test]
fn altitude_and_azimuth_within_tolerance_over_200_rows() {
    let rows = load_oracle();
    assert_eq!(rows.len(), 200);
    let mut max_alt_err: f64 = 0.0;
    let mut max_az_err: f64 = 0.0;
    for r in &rows {
        let pos = solar_position(&r.gt).unwrap();
        let alt_err = (pos.altitude_deg - r.exp_alt).abs();
        let mut az_err = (pos.azimuth_deg - r.exp_az).abs();
        if az_err > 180.0 {
            az_err = 360.0 - az_err;
        }
        max_alt_err = max_alt_err.max(alt_err);
        max_az_err = max_az_err.max(az_err);
    }
    println!("max altitude error: {max_alt_err:.4} deg, max azimuth error: {max_az_err:.4} deg");
    assert!(max_alt_err < 0.3, "max altitude error {max_alt_err}");
    assert!(max_az_err < 0.5, "max azimuth error {max_az_err}");
}

#[test]
fn sunrise_within_two_minutes_of_reference() {
    let rows = load_oracle();
    let mut max_err: f64 = 0.0;
    let mut checked = 0;
    for r in &rows {
        if let Some(exp) = r.exp_sunrise_local_min {
            let got = sunrise_local_minutes(&r.gt).unwrap();
            max_err = max_err.max((got - exp).abs());
            checked += 1;
        }
    }
    assert!(checked >= 30, "too few sunrise rows: {checked}");
    println!("max sunrise error: {max_err:.3} min over {checked} rows");
    assert!(max_err <= 2.0, "max sunrise error {max_err} min");
}
