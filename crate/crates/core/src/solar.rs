//! Solar geometry: sun altitude/azimuth and minutes from sunrise.
//!
//! Uses the NOAA spreadsheet formulation (Meeus-derived low-accuracy
//! theory: mean longitude, equation of center, obliquity with nutation
//! correction, equation of time), good to ~0.01 degrees over 2000-2050 —
//! ample for shade testing with a 5-degree sun-disk radius. Altitude is
//! geometric (no refraction); the standard -0.833 degree refraction
//! horizon is applied to sunrise only.
//!
//! Conventions: longitude positive east, azimuth clockwise from north in
//! [0, 360), UTC offset supplied by the caller in minutes.

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// Latitude poleward of which sunrise handling is not supported.
pub const POLAR_LATITUDE: f64 = 66.5;

/// A geographic location with a local civil timestamp.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoTime {
    pub latitude: f64,
    pub longitude: f64,
    pub altitude_m: f64,
    pub year: i32,
    pub month: u32,
    pub day: u32,
    /// Local civil time of day, fractional hours are carried in `second`.
    pub hour: u32,
    pub minute: u32,
    pub second: f64,
    /// Local civil time minus UTC, in minutes.
    pub utc_offset_min: i32,
}

impl GeoTime {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        latitude: f64,
        longitude: f64,
        altitude_m: f64,
        year: i32,
        month: u32,
        day: u32,
        hour: u32,
        minute: u32,
        second: f64,
        utc_offset_min: i32,
    ) -> Result<Self> {
        if !(-90.0..=90.0).contains(&latitude) {
            return Err(CoreError::InvalidInput(format!(
                "latitude {latitude} out of [-90, 90]"
            )));
        }
        if !(-180.0..=180.0).contains(&longitude) {
            return Err(CoreError::InvalidInput(format!(
                "longitude {longitude} out of [-180, 180]"
            )));
        }
        if altitude_m < -500.0 {
            return Err(CoreError::InvalidInput(format!(
                "altitude {altitude_m} below -500 m"
            )));
        }
        if NaiveDate::from_ymd_opt(year, month, day).is_none() {
            return Err(CoreError::InvalidDate(format!(
                "{year:04}-{month:02}-{day:02}"
            )));
        }
        if hour >= 24 || minute >= 60 || !(0.0..60.0).contains(&second) {
            return Err(CoreError::InvalidDate(format!(
                "time {hour:02}:{minute:02}:{second}"
            )));
        }
        if utc_offset_min.abs() > 18 * 60 {
            return Err(CoreError::InvalidInput(format!(
                "utc offset {utc_offset_min} min out of range"
            )));
        }
        Ok(GeoTime {
            latitude,
            longitude,
            altitude_m,
            year,
            month,
            day,
            hour,
            minute,
            second,
            utc_offset_min,
        })
    }

    /// Parses `YYYY-MM-DD` and `HH:MM[:SS]` strings.
    pub fn parse(
        latitude: f64,
        longitude: f64,
        altitude_m: f64,
        date: &str,
        time: &str,
        utc_offset_min: i32,
    ) -> Result<Self> {
        let d = NaiveDate::parse_from_str(date, "%Y-%m-%d")
            .map_err(|_| CoreError::InvalidDate(date.to_string()))?;
        let parts: Vec<&str> = time.split(':').collect();
        if parts.len() < 2 || parts.len() > 3 {
            return Err(CoreError::InvalidDate(format!("time `{time}`")));
        }
        let hour: u32 = parts[0]
            .parse()
            .map_err(|_| CoreError::InvalidDate(format!("time `{time}`")))?;
        let minute: u32 = parts[1]
            .parse()
            .map_err(|_| CoreError::InvalidDate(format!("time `{time}`")))?;
        let second: f64 = if parts.len() == 3 {
            parts[2]
                .parse()
                .map_err(|_| CoreError::InvalidDate(format!("time `{time}`")))?
        } else {
            0.0
        };
        GeoTime::new(
            latitude,
            longitude,
            altitude_m,
            d.year(),
            d.month(),
            d.day(),
            hour,
            minute,
            second,
            utc_offset_min,
        )
    }

    /// Local clock time in minutes since local midnight.
    pub fn local_minutes(&self) -> f64 {
        self.hour as f64 * 60.0 + self.minute as f64 + self.second / 60.0
    }

    /// Returns a copy at a different local clock time (same date).
    pub fn at_local_minutes(&self, minutes: f64) -> Self {
        let mut g = *self;
        let m = minutes.rem_euclid(24.0 * 60.0);
        g.hour = (m / 60.0) as u32;
        g.minute = (m % 60.0) as u32;
        g.second = (m - (g.hour as f64) * 60.0 - g.minute as f64) * 60.0;
        // guard against float rounding pushing second to 60
        if g.second >= 60.0 {
            g.second = 0.0;
            g.minute += 1;
            if g.minute == 60 {
                g.minute = 0;
                g.hour = (g.hour + 1) % 24;
            }
        }
        g
    }
}

/// Topocentric sun position plus the derived sunrise offset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolarPosition {
    /// Geometric altitude above the horizon, degrees in [-90, 90].
    pub altitude_deg: f64,
    /// Azimuth clockwise from north, degrees in [0, 360).
    pub azimuth_deg: f64,
    /// Minutes since the day's sunrise; negative before sunrise.
    pub minutes_from_sunrise: f64,
}

struct SunDay {
    eqtime_min: f64,
    decl_rad: f64,
}

/// Equation of time (minutes) and apparent declination (radians) at a UTC
/// instant, NOAA spreadsheet / Meeus low-accuracy formulation.
fn sun_day_params(gt: &GeoTime, hour_utc: f64) -> SunDay {
    // Julian centuries since J2000.0; 2000-01-01 00:00 UTC is JD 2451544.5.
    let epoch = NaiveDate::from_ymd_opt(2000, 1, 1).expect("epoch");
    let date = NaiveDate::from_ymd_opt(gt.year, gt.month, gt.day).expect("validated");
    let days = date.signed_duration_since(epoch).num_days() as f64 - 0.5 + hour_utc / 24.0;
    let t = days / 36525.0;

    let l0 = (280.46646 + t * (36000.76983 + t * 0.0003032)).rem_euclid(360.0);
    let m_deg = 357.52911 + t * (35999.05029 - 0.0001537 * t);
    let m = m_deg.to_radians();
    let ecc = 0.016708634 - t * (0.000042037 + 0.0000001267 * t);
    let eq_center = (1.914602 - t * (0.004817 + 0.000014 * t)) * m.sin()
        + (0.019993 - 0.000101 * t) * (2.0 * m).sin()
        + 0.000289 * (3.0 * m).sin();
    let true_long = l0 + eq_center;
    let omega = (125.04 - 1934.136 * t).to_radians();
    let apparent_long = (true_long - 0.00569 - 0.00478 * omega.sin()).to_radians();

    let mean_obliq = 23.0 + (26.0 + (21.448 - t * (46.815 + t * (0.00059 - t * 0.001813))) / 60.0) / 60.0;
    let obliq = (mean_obliq + 0.00256 * omega.cos()).to_radians();

    let decl_rad = (obliq.sin() * apparent_long.sin()).asin();

    let y = (obliq / 2.0).tan().powi(2);
    let l0r = l0.to_radians();
    let eqtime_rad = y * (2.0 * l0r).sin() - 2.0 * ecc * m.sin()
        + 4.0 * ecc * y * m.sin() * (2.0 * l0r).cos()
        - 0.5 * y * y * (4.0 * l0r).sin()
        - 1.25 * ecc * ecc * (2.0 * m).sin();
    let eqtime_min = 4.0 * eqtime_rad.to_degrees();

    SunDay {
        eqtime_min,
        decl_rad,
    }
}

/// Sun altitude and azimuth for a location and local civil time.
pub fn solar_position(gt: &GeoTime) -> Result<SolarPosition> {
    // GeoTime construction already validated ranges; recheck date defensively
    // for callers constructing the struct literally.
    if NaiveDate::from_ymd_opt(gt.year, gt.month, gt.day).is_none() {
        return Err(CoreError::InvalidDate(format!(
            "{:04}-{:02}-{:02}",
            gt.year, gt.month, gt.day
        )));
    }
    let local_min = gt.local_minutes();
    let hour_utc = (local_min - gt.utc_offset_min as f64) / 60.0;
    let day = sun_day_params(gt, hour_utc);

    // true solar time in minutes
    let time_offset = day.eqtime_min + 4.0 * gt.longitude - gt.utc_offset_min as f64;
    let tst = local_min + time_offset;
    let ha_deg = tst / 4.0 - 180.0;
    let ha = ha_deg.to_radians();

    let lat = gt.latitude.to_radians();
    let cos_zenith =
        lat.sin() * day.decl_rad.sin() + lat.cos() * day.decl_rad.cos() * ha.cos();
    let zenith = cos_zenith.clamp(-1.0, 1.0).acos();
    let altitude_deg = 90.0 - zenith.to_degrees();

    // azimuth from south, west-positive, then rotated to north-clockwise
    let az_south = (ha.sin()).atan2(ha.cos() * lat.sin() - day.decl_rad.tan() * lat.cos());
    let azimuth_deg = (az_south.to_degrees() + 180.0).rem_euclid(360.0);

    let minutes_from_sunrise = match sunrise_local_minutes(gt) {
        Ok(sr) => local_min - sr,
        Err(CoreError::PolarLatitude(_)) => f64::NAN,
        Err(e) => return Err(e),
    };

    Ok(SolarPosition {
        altitude_deg,
        azimuth_deg,
        minutes_from_sunrise,
    })
}

/// Local clock minute of the day's sunrise (zenith 90.833 deg).
pub fn sunrise_local_minutes(gt: &GeoTime) -> Result<f64> {
    if gt.latitude.abs() >= POLAR_LATITUDE {
        return Err(CoreError::PolarLatitude(gt.latitude));
    }
    // Evaluate the day parameters at local noon; the sub-degree drift of
    // declination within a day is below the +-2 min contract.
    let noon_utc = (720.0 - gt.utc_offset_min as f64) / 60.0;
    let day = sun_day_params(gt, noon_utc);
    let lat = gt.latitude.to_radians();

    let cos_ha = (90.833_f64.to_radians().cos()
        - lat.sin() * day.decl_rad.sin())
        / (lat.cos() * day.decl_rad.cos());
    if !(-1.0..=1.0).contains(&cos_ha) {
        // No sunrise on this date even at sub-polar latitude.
        return Err(CoreError::PolarLatitude(gt.latitude));
    }
    let ha_deg = cos_ha.acos().to_degrees();
    let sunrise_utc_min = 720.0 - 4.0 * (gt.longitude + ha_deg) - day.eqtime_min;
    Ok(sunrise_utc_min + gt.utc_offset_min as f64)
}

/// Minutes elapsed since the day's sunrise; negative before sunrise.
pub fn sunrise_minutes(gt: &GeoTime) -> Result<f64> {
    let sr = sunrise_local_minutes(gt)?;
    Ok(gt.local_minutes() - sr)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tempe(date: (i32, u32, u32), hour: u32, minute: u32) -> GeoTime {
        GeoTime::new(
            33.4255, -111.94, 360.0, date.0, date.1, date.2, hour, minute, 0.0, -420,
        )
        .unwrap()
    }

    #[test]
    fn equator_equinox_noon_is_near_zenith() {
        // Solar noon at (0, 0) on the March equinox: altitude within the
        // declination residual of 90.
        let gt = GeoTime::new(0.0, 0.0, 0.0, 2018, 3, 20, 12, 8, 0.0, 0).unwrap();
        let pos = solar_position(&gt).unwrap();
        assert!(
            pos.altitude_deg > 89.5,
            "altitude {} too far from zenith",
            pos.altitude_deg
        );
    }

    #[test]
    fn tempe_june_solstice_noon() {
        // At computed solar noon (~12:29 MST) the NOAA table gives
        // alt ~80.0 and azimuth crossing 180.
        let gt = tempe((2018, 6, 21), 12, 0);
        let day = sun_day_params(&gt, 19.5);
        let noon_local = 720.0 - day.eqtime_min - 4.0 * gt.longitude - 420.0;
        let pos = solar_position(&gt.at_local_minutes(noon_local)).unwrap();
        assert!((pos.altitude_deg - 80.0).abs() < 0.3, "alt {}", pos.altitude_deg);
        assert!((pos.azimuth_deg - 180.0).abs() < 1.0, "az {}", pos.azimuth_deg);
    }

    #[test]
    fn tempe_night_is_below_horizon() {
        let pos = solar_position(&tempe((2018, 6, 21), 23, 0)).unwrap();
        assert!(pos.altitude_deg < 0.0);
    }

    #[test]
    fn tempe_sunrise_offset() {
        // NOAA sunrise for Tempe on 2018-06-21 is ~05:18 MST.
        let m = sunrise_minutes(&tempe((2018, 6, 21), 7, 30)).unwrap();
        assert!((m - 132.0).abs() <= 2.0, "minutes from sunrise {m}");
        let m2 = sunrise_minutes(&tempe((2018, 6, 21), 8, 30)).unwrap();
        assert!((m2 - (m + 60.0)).abs() < 1e-9, "clock-linearity violated");
    }

    #[test]
    fn zero_at_computed_sunrise() {
        let gt = tempe((2018, 6, 21), 0, 0);
        let sr = sunrise_local_minutes(&gt).unwrap();
        let at_sunrise = gt.at_local_minutes(sr);
        let m = sunrise_minutes(&at_sunrise).unwrap();
        assert!(m.abs() < 1e-9, "minutes from sunrise at sunrise = {m}");
    }

    #[test]
    fn polar_latitude_rejected_for_sunrise() {
        let gt = GeoTime::new(70.0, 20.0, 0.0, 2018, 6, 21, 12, 0, 0.0, 60).unwrap();
        assert!(matches!(
            sunrise_minutes(&gt),
            Err(CoreError::PolarLatitude(_))
        ));
    }

    #[test]
    fn invalid_date_rejected() {
        assert!(GeoTime::new(0.0, 0.0, 0.0, 2018, 2, 30, 12, 0, 0.0, 0).is_err());
        assert!(GeoTime::parse(0.0, 0.0, 0.0, "2018-02-30", "12:00", 0).is_err());
        assert!(GeoTime::parse(0.0, 0.0, 0.0, "2018-06-21", "25:00", 0).is_err());
    }

    #[test]
    fn azimuth_monotonic_through_noon() {
        // 06:00-18:00 at Tempe in June, 1-minute steps: azimuth strictly
        // increases, no wrap.
        let gt = tempe((2018, 6, 21), 0, 0);
        let mut prev = None;
        let mut t = 6.0 * 60.0;
        while t <= 18.0 * 60.0 {
            let pos = solar_position(&gt.at_local_minutes(t)).unwrap();
            if let Some(p) = prev {
                assert!(
                    pos.azimuth_deg > p,
                    "azimuth not increasing at t={t}: {} <= {p}",
                    pos.azimuth_deg
                );
            }
            prev = Some(pos.azimuth_deg);
            t += 1.0;
        }
    }

    #[test]
    fn altitude_symmetric_about_solar_noon() {
        let gt = tempe((2018, 6, 21), 0, 0);
        // solar noon: tst = 720 -> local = 720 - eqtime - 4*lon + offset
        let day = sun_day_params(&gt, 19.5);
        let noon_local = 720.0 - day.eqtime_min - 4.0 * gt.longitude - 420.0;
        for k in [10.0, 30.0, 60.0, 120.0, 180.0] {
            let a = solar_position(&gt.at_local_minutes(noon_local - k))
                .unwrap()
                .altitude_deg;
            let b = solar_position(&gt.at_local_minutes(noon_local + k))
                .unwrap()
                .altitude_deg;
            assert!((a - b).abs() < 0.5, "asymmetry {} at +-{k} min", a - b);
        }
    }
}
