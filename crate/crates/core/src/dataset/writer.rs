use std::fs::{self, File};
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use super::{
    encode_frame, generate_example, shard_names, DatasetConfig, DatasetManifest, PlanItem, ShardInfo, FORMAT_VERSION,
    MANIFEST_FILE,
};
use crate::classes::NUM_CLASSES;
use crate::error::{Error, Result};

/// Examples generated per parallel batch; bounds writer memory.
const BATCH: u64 = 256;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WriteOptions {
    /// Generation threads; 0 uses all available cores.
    pub workers: usize,
    /// Replace an existing dataset in a non-empty directory.
    pub force: bool,
}

fn is_dataset_file(name: &str) -> bool {
    name == MANIFEST_FILE || (name.starts_with("shard-") && (name.ends_with(".iq") || name.ends_with(".meta.jsonl")))
}

fn prepare_dir(out_dir: &Path, force: bool) -> Result<()> {
    if out_dir.exists() {
        let entries: Vec<_> = fs::read_dir(out_dir)?.collect::<std::io::Result<_>>()?;
        if !entries.is_empty() {
            if !force {
                return Err(Error::DirectoryNotEmpty(out_dir.to_path_buf()));
            }
            for e in entries {
                if is_dataset_file(&e.file_name().to_string_lossy()) {
                    fs::remove_file(e.path())?;
                }
            }
        }
    }
    fs::create_dir_all(out_dir)?;
    Ok(())
}

/// Writes the dataset with `workers` generation threads and no overwrite.
pub fn write_shards(config: &DatasetConfig, out_dir: &Path, workers: usize) -> Result<DatasetManifest> {
    write_shards_with(config, out_dir, &WriteOptions { workers, force: false })
}

/// Generates every example in parallel and writes them in index order, so
/// the output bytes do not depend on the worker count.
pub fn write_shards_with(config: &DatasetConfig, out_dir: &Path, options: &WriteOptions) -> Result<DatasetManifest> {
    config.validate()?;
    prepare_dir(out_dir, options.force)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.workers)
        .build()
        .map_err(|e| Error::invalid("workers", e.to_string()))?;

    let mut overall = Sha256::new();
    let mut class_counts = vec![0u64; NUM_CLASSES];
    let mut shards = Vec::new();
    let shard_size = config.shard_size as u64;
    let num_shards = config.num_examples.div_ceil(shard_size);
    let mut frame_bytes = Vec::new();

    for shard in 0..num_shards as usize {
        let start = shard as u64 * shard_size;
        let end = (start + shard_size).min(config.num_examples);
        let (iq_file, meta_file) = shard_names(shard);
        let mut iq = BufWriter::new(File::create(out_dir.join(&iq_file))?);
        let mut iq_hash = Sha256::new();
        let mut meta = Vec::new();

        let mut batch_start = start;
        while batch_start < end {
            let batch_end = (batch_start + BATCH).min(end);
            let examples = pool.install(|| {
                (batch_start..batch_end)
                    .into_par_iter()
                    .map(|i| generate_example(&PlanItem::new(config.dataset_seed, i), config))
                    .collect::<Result<Vec<_>>>()
            })?;
            for (frame, m) in examples {
                frame_bytes.clear();
                encode_frame(&frame, &mut frame_bytes);
                iq.write_all(&frame_bytes)?;
                iq_hash.update(&frame_bytes);
                overall.update(&frame_bytes);
                serde_json::to_writer(&mut meta, &m)?;
                meta.push(b'\n');
                class_counts[m.class_index] += 1;
            }
            batch_start = batch_end;
        }
        iq.into_inner().map_err(|e| e.into_error())?.sync_all()?;
        fs::write(out_dir.join(&meta_file), &meta)?;
        overall.update(&meta);
        shards.push(ShardInfo {
            index: shard,
            iq_file,
            meta_file,
            start,
            count: end - start,
            iq_sha256: hex::encode(iq_hash.finalize()),
            meta_sha256: hex::encode(Sha256::digest(&meta)),
        });
    }

    let manifest = DatasetManifest {
        format_version: FORMAT_VERSION,
        config: config.clone(),
        total_examples: config.num_examples,
        class_counts,
        shards,
        digest: hex::encode(overall.finalize()),
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(out_dir.join(MANIFEST_FILE), text)?;
    Ok(manifest)
}

fn hash_file(path: &Path, overall: &mut Sha256) -> Result<String> {
    let mut file = File::open(path)?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = file.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
        overall.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

/// Recomputes the digests of a dataset's shards, returning per-shard
/// `(iq, meta)` digests and the overall digest.
pub fn digest_files(dir: &Path, manifest: &DatasetManifest) -> Result<(Vec<(String, String)>, String)> {
    let mut overall = Sha256::new();
    let mut per_shard = Vec::with_capacity(manifest.shards.len());
    for shard in &manifest.shards {
        let iq = hash_file(&dir.join(&shard.iq_file), &mut overall)?;
        let meta = hash_file(&dir.join(&shard.meta_file), &mut overall)?;
        per_shard.push((iq, meta));
    }
    Ok((per_shard, hex::encode(overall.finalize())))
}
