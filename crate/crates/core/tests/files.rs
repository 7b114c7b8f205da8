mod common;

use common::random_field;
use mirt::geometry::SinogramGrid;
use mirt::grid::GridSpec;
use mirt::io::{self, FileContent};
use mirt::ray::mirt_forward;
use mirt::tensor::SymmetricTensorField;
use mirt::Error;

#[test]
fn all_kinds_round_trip_on_disk() {
    let dir = tempfile::tempdir().unwrap();
    let g = GridSpec::centered(9, 0.7).unwrap();
    let f = random_field(2, 1, g, 3);
    let s = SymmetricTensorField::from_mixed(random_field(2, 0, g, 4)).unwrap();
    let phi = mirt_forward(&f, &SinogramGrid::for_field(&g, 8).unwrap()).unwrap();
    for (name, content) in [("f.mirt", FileContent::Mixed(f)), ("s.mirt", FileContent::Symmetric(s)), ("p.mirt", FileContent::Sinogram(phi))] {
        let path = dir.path().join(name);
        io::write(&path, &content).unwrap();
        let back = io::read(&path).unwrap();
        assert_eq!(back.kind(), content.kind());
        assert_eq!(io::encode(&back), std::fs::read(&path).unwrap(), "{name}");
    }
    assert!(matches!(io::read_sinogram(&dir.path().join("f.mirt")), Err(Error::Invalid(_) | Error::Shape(_) | Error::MalformedHeader(_))));
}

#[test]
fn damaged_files_give_distinct_errors() {
    let f = random_field(1, 1, GridSpec::centered(4, 1.0).unwrap(), 1);
    let good = io::encode_field(&f);
    let nl = good.iter().position(|&b| b == b'\n').unwrap();

    assert!(matches!(io::decode(&good[..good.len() - 8]), Err(Error::TruncatedPayload { .. })));
    let mut long = good.clone();
    long.extend_from_slice(&[0; 8]);
    assert!(matches!(io::decode(&long), Err(Error::MalformedHeader(_))));

    let header = std::str::from_utf8(&good[..nl]).unwrap();
    let mut bad_magic = header.replace("MTF1", "MTF2").into_bytes();
    bad_magic.extend_from_slice(&good[nl..]);
    assert!(matches!(io::decode(&bad_magic), Err(Error::MagicMismatch(m)) if m == "MTF2"));

    let mut no_k = header.replace("\"k\":1,", "").into_bytes();
    no_k.extend_from_slice(&good[nl..]);
    assert!(matches!(io::decode(&no_k), Err(Error::MalformedHeader(_))));

    assert!(matches!(io::decode(b"not json\n"), Err(Error::MalformedHeader(_))));
    assert!(matches!(io::decode(b""), Err(Error::MalformedHeader(_))));
    assert!(matches!(io::read(std::path::Path::new("/nonexistent/x.mirt")), Err(Error::Io { .. })));
}

#[test]
fn csv_and_pgm_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    io::write_csv(&csv, &["r", "leakage"], &[vec!["0".into(), "1e-30".into()]]).unwrap();
    assert_eq!(std::fs::read_to_string(&csv).unwrap(), "r,leakage\n0,1e-30\n");

    let f = random_field(1, 0, GridSpec::centered(5, 1.0).unwrap(), 2);
    io::write_pgm_planes(&dir.path().join("img"), &f).unwrap();
    let mut names: Vec<String> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    assert_eq!(names.iter().filter(|n| n.ends_with(".pgm")).count(), 2, "{names:?}");
    let (bytes, lo, hi) = io::encode_pgm(f.plane(0, 0));
    assert!(bytes.starts_with(b"P2\n5 5\n255\n") && lo <= hi);
}
