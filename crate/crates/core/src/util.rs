//! Small shared helpers: seed derivation and gzip-aware file IO.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use flate2::read::MultiGzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;

/// One round of SplitMix64. Used to expand seeds into independent streams.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a sub-seed from a root seed and a stream identifier.
///
/// All randomness in the toolkit flows from one root seed through named
/// streams so that components are individually reproducible.
pub fn derive_seed(root: u64, stream: u64) -> u64 {
    splitmix64(root ^ splitmix64(stream))
}

/// Returns true when the path should be treated as gzip-compressed.
pub fn is_gz_path(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("gz"))
}

/// Opens a buffered reader, transparently decompressing `.gz` files.
pub fn open_reader(path: &Path) -> io::Result<Box<dyn BufRead + Send>> {
    let file = File::open(path)?;
    if is_gz_path(path) {
        Ok(Box::new(BufReader::new(MultiGzDecoder::new(file))))
    } else {
        Ok(Box::new(BufReader::new(file)))
    }
}

/// Creates a buffered writer, transparently compressing `.gz` files.
pub fn create_writer(path: &Path) -> io::Result<Box<dyn Write + Send>> {
    create_writer_gz(path, is_gz_path(path))
}

/// Creates a buffered writer with an explicit compression decision, for
/// callers writing through a temporary name that hides the final suffix.
pub fn create_writer_gz(path: &Path, gz: bool) -> io::Result<Box<dyn Write + Send>> {
    let file = File::create(path)?;
    if gz {
        Ok(Box::new(BufWriter::new(GzEncoder::new(
            file,
            Compression::default(),
        ))))
    } else {
        Ok(Box::new(BufWriter::new(file)))
    }
}
