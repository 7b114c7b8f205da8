//! Container files, CSV tables and PGM previews.

use mirt::geometry::SinogramGrid;
use mirt::grid::GridSpec;
use mirt::io::{self, FileContent};
use mirt::presets::{make_preset, PresetKind};
use mirt::ray::mirt_forward;

fn main() -> mirt::Result<()> {
    let dir = std::env::temp_dir().join("mirt-files-example");
    std::fs::create_dir_all(&dir).map_err(|e| mirt::Error::Invalid(e.to_string()))?;

    let grid = GridSpec::centered(64, 1.0)?;
    let (_, f) = make_preset(PresetKind::Gaussian, 1, 1, &grid, 0)?;
    let field_path = dir.join("field.mirt");
    io::write_field(&field_path, &f)?;

    let phi = mirt_forward(&f, &SinogramGrid::for_field(&grid, 90)?)?;
    let sino_path = dir.join("sino.mirt");
    io::write_sinogram(&sino_path, &phi)?;

    for path in [&field_path, &sino_path] {
        let bytes = std::fs::read(path).map_err(|e| mirt::Error::Invalid(e.to_string()))?;
        let header_len = bytes.iter().position(|&b| b == b'\n').unwrap_or(0);
        println!("{}: {}", path.display(), String::from_utf8_lossy(&bytes[..header_len]));
        match io::decode(&bytes)? {
            FileContent::Mixed(g) => println!("  identical after reading: {}", g.data() == f.data()),
            FileContent::Sinogram(s) => println!("  identical after reading: {}", s.data() == phi.data()),
            FileContent::Symmetric(_) => unreachable!(),
        }
    }

    io::write_pgm_planes(&dir.join("field"), &f)?;
    println!("{}", std::fs::read_to_string(dir.join("field_ranges.csv")).map_err(|e| mirt::Error::Invalid(e.to_string()))?);
    Ok(())
}
