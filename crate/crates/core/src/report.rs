//! Report persistence: CSV with 17 significant digits, spec hashes and
//! file naming.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::error::Result;

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// First 16 hex digits of the SHA-256 of the value's JSON encoding.
pub fn spec_hash<T: Serialize + ?Sized>(value: &T) -> String {
    let json = serde_json::to_vec(value).expect("serializable value");
    sha256_hex(&json)[..16].to_string()
}

/// `{experiment}_{spec-hash}_{seed}.csv`
pub fn report_file_name(experiment: &str, hash: &str, seed: u64) -> String {
    format!("{experiment}_{hash}_{seed}.csv")
}

pub fn fmt_sig17(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

pub fn sig17<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_sig17(*x))
}

pub fn sig17_opt<S: Serializer>(x: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_str(&fmt_sig17(*v)),
        None => s.serialize_str(""),
    }
}

pub fn csv_bytes<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, csv_bytes(rows)?)?;
    Ok(())
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path)?;
    let rows = r.deserialize().collect::<std::result::Result<Vec<T>, _>>()?;
    Ok(rows)
}

pub fn parse_csv<T: DeserializeOwned>(bytes: &[u8]) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_reader(bytes);
    let rows = r.deserialize().collect::<std::result::Result<Vec<T>, _>>()?;
    Ok(rows)
}

/// Path of a report inside `dir`.
pub fn report_path(dir: &Path, experiment: &str, hash: &str, seed: u64) -> PathBuf {
    dir.join(report_file_name(experiment, hash, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;

    #[derive(Serialize, Deserialize, Debug, PartialEq)]
    struct Row {
        n: usize,
        #[serde(serialize_with = "sig17")]
        x: f64,
        #[serde(serialize_with = "sig17_opt")]
        y: Option<f64>,
    }

    #[test]
    fn seventeen_digits_round_trip() {
        let rows = vec![
            Row { n: 3, x: 0.1, y: None },
            Row { n: 4, x: 1.0 / 3.0, y: Some(f64::NAN) },
            Row { n: 5, x: -2.5e-300, y: Some(f64::INFINITY) },
        ];
        let bytes = csv_bytes(&rows).unwrap();
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert!(text.starts_with("n,x,y\n3,1.0000000000000001e-1,\n"));
        let back: Vec<Row> = parse_csv(&bytes).unwrap();
        assert_eq!(back[0], rows[0]);
        assert_eq!(back[1].x, 1.0 / 3.0);
        assert!(back[1].y.unwrap().is_nan());
        assert_eq!(back[2].y, Some(f64::INFINITY));
        assert_eq!(back[2].x, -2.5e-300);
    }

    #[test]
    fn hashes_are_stable() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
        assert_eq!(spec_hash(&[1, 2]).len(), 16);
        assert_eq!(report_file_name("delta", "00ff", 7), "delta_00ff_7.csv");
    }
}
