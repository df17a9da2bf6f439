use std::fs::{self, File};
use std::io::{BufRead, BufReader, Read, Seek, SeekFrom};
use std::path::{Path, PathBuf};

use super::{decode_frame, digest_files, DatasetManifest, ExampleMeta, MANIFEST_FILE, SAMPLE_BYTES};
use crate::error::{Error, Result};
use crate::frame::ComplexFrame;

pub fn load_manifest(dir: &Path) -> Result<DatasetManifest> {
    let path = dir.join(MANIFEST_FILE);
    if !path.is_file() {
        return Err(Error::ManifestMissing(dir.to_path_buf()));
    }
    let manifest: DatasetManifest = serde_json::from_str(&fs::read_to_string(path)?)?;
    if manifest.format_version != super::FORMAT_VERSION {
        return Err(Error::Format(format!(
            "unsupported format version {}",
            manifest.format_version
        )));
    }
    Ok(manifest)
}

/// Checks every shard and the overall digest against the manifest.
pub fn verify_digests(dir: &Path, manifest: &DatasetManifest) -> Result<()> {
    let (per_shard, overall) = digest_files(dir, manifest)?;
    for (shard, (iq, meta)) in manifest.shards.iter().zip(per_shard) {
        for (file, expected, found) in [
            (&shard.iq_file, &shard.iq_sha256, iq),
            (&shard.meta_file, &shard.meta_sha256, meta),
        ] {
            if *expected != found {
                return Err(Error::DigestMismatch {
                    file: file.clone(),
                    expected: expected.clone(),
                    found,
                });
            }
        }
    }
    if overall != manifest.digest {
        return Err(Error::DigestMismatch {
            file: MANIFEST_FILE.to_string(),
            expected: manifest.digest.clone(),
            found: overall,
        });
    }
    Ok(())
}

/// Sequential reader over a dataset directory, yielding examples in index
/// order.
pub struct DatasetReader {
    dir: PathBuf,
    manifest: DatasetManifest,
    shard: usize,
    next_index: u64,
    open: Option<(BufReader<File>, BufReader<File>)>,
    buf: Vec<u8>,
}

/// Opens a dataset, optionally validating all digests first.
pub fn read(dir: &Path, verify: bool) -> Result<DatasetReader> {
    let manifest = load_manifest(dir)?;
    if verify {
        verify_digests(dir, &manifest)?;
    }
    Ok(DatasetReader {
        dir: dir.to_path_buf(),
        buf: vec![0; manifest.config.frame_len * SAMPLE_BYTES],
        manifest,
        shard: 0,
        next_index: 0,
        open: None,
    })
}

impl DatasetReader {
    pub fn manifest(&self) -> &DatasetManifest {
        &self.manifest
    }

    fn next_example(&mut self) -> Result<Option<(ComplexFrame, ExampleMeta)>> {
        loop {
            let Some(info) = self.manifest.shards.get(self.shard) else {
                return Ok(None);
            };
            if self.next_index >= info.start + info.count {
                self.shard += 1;
                self.open = None;
                continue;
            }
            if self.open.is_none() {
                let iq = BufReader::new(File::open(self.dir.join(&info.iq_file))?);
                let meta = BufReader::new(File::open(self.dir.join(&info.meta_file))?);
                self.open = Some((iq, meta));
            }
            let (iq, meta) = self.open.as_mut().expect("shard opened above");
            iq.read_exact(&mut self.buf)
                .map_err(|e| Error::Format(format!("{}: {e}", info.iq_file)))?;
            let mut line = String::new();
            if meta.read_line(&mut line)? == 0 {
                return Err(Error::Format(format!("{} ends early", info.meta_file)));
            }
            let m: ExampleMeta = serde_json::from_str(line.trim_end())?;
            if m.index != self.next_index {
                return Err(Error::Format(format!(
                    "expected example {}, found {}",
                    self.next_index, m.index
                )));
            }
            self.next_index += 1;
            return Ok(Some((decode_frame(&self.buf), m)));
        }
    }
}

impl Iterator for DatasetReader {
    type Item = Result<(ComplexFrame, ExampleMeta)>;

    fn next(&mut self) -> Option<Self::Item> {
        match self.next_example() {
            Ok(Some(v)) => Some(Ok(v)),
            Ok(None) => None,
            Err(e) => {
                // Stop after the first error.
                self.shard = self.manifest.shards.len();
                Some(Err(e))
            }
        }
    }
}

/// Random access to one example.
pub fn read_example(dir: &Path, index: u64) -> Result<(ComplexFrame, ExampleMeta)> {
    let manifest = load_manifest(dir)?;
    let info = manifest
        .shards
        .iter()
        .find(|s| (s.start..s.start + s.count).contains(&index))
        .ok_or_else(|| Error::invalid("index", format!("{index} outside 0..{}", manifest.total_examples)))?;
    let offset = index - info.start;
    let frame_bytes = manifest.config.frame_len * SAMPLE_BYTES;
    let mut iq = File::open(dir.join(&info.iq_file))?;
    iq.seek(SeekFrom::Start(offset * frame_bytes as u64))?;
    let mut buf = vec![0; frame_bytes];
    iq.read_exact(&mut buf)
        .map_err(|e| Error::Format(format!("{}: {e}", info.iq_file)))?;
    let meta = BufReader::new(File::open(dir.join(&info.meta_file))?);
    let line = meta
        .lines()
        .nth(offset as usize)
        .ok_or_else(|| Error::Format(format!("{} ends early", info.meta_file)))??;
    let m: ExampleMeta = serde_json::from_str(&line)?;
    if m.index != index {
        return Err(Error::Format(format!("expected example {index}, found {}", m.index)));
    }
    Ok((decode_frame(&buf), m))
}
