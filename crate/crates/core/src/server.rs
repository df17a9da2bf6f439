//! Online batch server.
//!
//! Messages are framed by a 10-byte header: ASCII `SG53`, version `1`,
//! message type, payload length as `u32` little-endian.
//!
//! | type | direction | payload                                            |
//! |------|-----------|----------------------------------------------------|
//! | 1    | request   | JSON [`BatchRequest`]                              |
//! | 2    | response  | JSON [`BatchHeader`], `\n`, frames, meta JSONL     |
//! | 255  | error     | JSON `{"error": "..."}`                            |
//!
//! Frames are `f32` little-endian interleaved IQ, frame-major. Example `k`
//! of a batch is generated from `derive_stream(seed, start_index + k)`, so
//! a response depends only on its request. A malformed header gets an
//! error frame and the connection is closed; a bad request payload gets an
//! error frame and the connection stays open.

use std::io::{self, BufReader, BufWriter, Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{decode_frame, encode_frame, generate_example, DatasetConfig, ExampleMeta, PlanItem, Variant};
use crate::error::{Error, Result};
use crate::frame::{ComplexFrame, DEFAULT_FRAME_LEN};

pub const MAGIC: [u8; 4] = *b"SG53";
pub const PROTOCOL_VERSION: u8 = 1;
pub const HEADER_LEN: usize = 10;
pub const MSG_REQUEST: u8 = 1;
pub const MSG_BATCH: u8 = 2;
pub const MSG_ERROR: u8 = 255;
pub const MAX_BATCH: u32 = 4096;
pub const MAX_FRAME_LEN: usize = 1 << 16;
/// Largest request payload accepted.
pub const MAX_REQUEST_BYTES: u32 = 1 << 16;
pub const DTYPE: &str = "f32le-interleaved";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchRequest {
    pub batch_size: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<Variant>,
    pub seed: u64,
    #[serde(default)]
    pub start_index: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame_len: Option<usize>,
}

impl BatchRequest {
    pub fn new(batch_size: u32, seed: u64, start_index: u64) -> Self {
        BatchRequest {
            batch_size,
            variant: None,
            seed,
            start_index,
            frame_len: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchHeader {
    pub count: u32,
    pub frame_len: usize,
    pub dtype: String,
    pub meta_bytes: u64,
}

/// Defaults applied to requests that omit a field.
#[derive(Debug, Clone, PartialEq)]
pub struct ServerConfig {
    pub variant: Variant,
    pub frame_len: usize,
    /// Shared generation threads; 0 uses all cores.
    pub workers: usize,
}

impl Default for ServerConfig {
    fn default() -> Self {
        ServerConfig {
            variant: Variant::ImpairedTrain,
            frame_len: DEFAULT_FRAME_LEN,
            workers: 0,
        }
    }
}

pub fn encode_header(message_type: u8, payload_len: u32) -> [u8; HEADER_LEN] {
    let mut h = [0u8; HEADER_LEN];
    h[..4].copy_from_slice(&MAGIC);
    h[4] = PROTOCOL_VERSION;
    h[5] = message_type;
    h[6..].copy_from_slice(&payload_len.to_le_bytes());
    h
}

/// Parses a header, returning `(message_type, payload_len)`.
pub fn decode_header(h: &[u8; HEADER_LEN]) -> Result<(u8, u32)> {
    if h[..4] != MAGIC {
        return Err(Error::Protocol(format!("bad magic {:?}", &h[..4])));
    }
    if h[4] != PROTOCOL_VERSION {
        return Err(Error::Protocol(format!("unsupported version {}", h[4])));
    }
    Ok((h[5], u32::from_le_bytes([h[6], h[7], h[8], h[9]])))
}

pub fn write_message<W: Write>(out: &mut W, message_type: u8, payload: &[u8]) -> Result<()> {
    let len = u32::try_from(payload.len()).map_err(|_| Error::Protocol("payload exceeds 4 GiB".into()))?;
    out.write_all(&encode_header(message_type, len))?;
    out.write_all(payload)?;
    out.flush()?;
    Ok(())
}

/// Reads one message. `Ok(None)` on a clean end of stream.
pub fn read_message<R: Read>(input: &mut R, max_len: u32) -> Result<Option<(u8, Vec<u8>)>> {
    let mut h = [0u8; HEADER_LEN];
    match input.read_exact(&mut h[..1]) {
        Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => return Ok(None),
        r => r?,
    }
    input.read_exact(&mut h[1..])?;
    let (kind, len) = decode_header(&h)?;
    if len > max_len {
        return Err(Error::Protocol(format!("payload of {len} bytes exceeds {max_len}")));
    }
    let mut payload = vec![0u8; len as usize];
    input.read_exact(&mut payload)?;
    Ok(Some((kind, payload)))
}

fn error_payload(msg: &str) -> Vec<u8> {
    serde_json::to_vec(&serde_json::json!({ "error": msg })).unwrap_or_default()
}

/// Dataset config a request resolves to.
pub fn resolve(request: &BatchRequest, defaults: &ServerConfig) -> Result<DatasetConfig> {
    if request.batch_size == 0 || request.batch_size > MAX_BATCH {
        return Err(Error::invalid(
            "batch_size",
            format!("{} not in 1..={MAX_BATCH}", request.batch_size),
        ));
    }
    let frame_len = request.frame_len.unwrap_or(defaults.frame_len);
    if frame_len == 0 || frame_len > MAX_FRAME_LEN {
        return Err(Error::invalid(
            "frame_len",
            format!("{frame_len} not in 1..={MAX_FRAME_LEN}"),
        ));
    }
    let variant = request.variant.unwrap_or(defaults.variant);
    Ok(DatasetConfig::new(variant, request.batch_size as u64, request.seed).with_frame_len(frame_len))
}

/// Builds the type-2 payload for a request.
pub fn build_batch(request: &BatchRequest, defaults: &ServerConfig) -> Result<Vec<u8>> {
    let config = resolve(request, defaults)?;
    let examples = (0..request.batch_size as u64)
        .into_par_iter()
        .map(|k| {
            let index = request
                .start_index
                .checked_add(k)
                .ok_or_else(|| Error::invalid("start_index", "index overflows u64"))?;
            generate_example(&PlanItem::new(request.seed, index), &config)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut frames = Vec::with_capacity(examples.len() * config.frame_len * 8);
    let mut meta = Vec::new();
    for (frame, m) in &examples {
        encode_frame(frame, &mut frames);
        serde_json::to_writer(&mut meta, m)?;
        meta.push(b'\n');
    }
    let header = BatchHeader {
        count: request.batch_size,
        frame_len: config.frame_len,
        dtype: DTYPE.to_string(),
        meta_bytes: meta.len() as u64,
    };
    let mut out = serde_json::to_vec(&header)?;
    out.push(b'\n');
    out.extend_from_slice(&frames);
    out.extend_from_slice(&meta);
    Ok(out)
}

/// Decoded type-2 payload.
#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    pub header: BatchHeader,
    pub frames: Vec<ComplexFrame>,
    pub metas: Vec<ExampleMeta>,
}

pub fn parse_batch(payload: &[u8]) -> Result<Batch> {
    let nl = payload
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::Protocol("batch header not terminated".into()))?;
    let header: BatchHeader = serde_json::from_slice(&payload[..nl])?;
    let frame_bytes = header.frame_len * 8;
    let body = &payload[nl + 1..];
    let frames_len = frame_bytes * header.count as usize;
    if body.len() != frames_len + header.meta_bytes as usize {
        return Err(Error::Protocol("batch payload length mismatch".into()));
    }
    let frames = body[..frames_len]
        .chunks_exact(frame_bytes.max(1))
        .map(decode_frame)
        .collect();
    let metas = body[frames_len..]
        .split(|&b| b == b'\n')
        .filter(|l| !l.is_empty())
        .map(serde_json::from_slice)
        .collect::<serde_json::Result<Vec<ExampleMeta>>>()?;
    Ok(Batch { header, frames, metas })
}

fn handle_connection(stream: TcpStream, defaults: &ServerConfig, pool: &rayon::ThreadPool) -> Result<()> {
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut writer = BufWriter::new(stream);
    loop {
        let (kind, payload) = match read_message(&mut reader, MAX_REQUEST_BYTES) {
            Ok(Some(m)) => m,
            Ok(None) => return Ok(()),
            Err(Error::Protocol(msg)) => {
                write_message(&mut writer, MSG_ERROR, &error_payload(&msg))?;
                return Ok(());
            }
            Err(e) => return Err(e),
        };
        if kind != MSG_REQUEST {
            write_message(
                &mut writer,
                MSG_ERROR,
                &error_payload(&format!("unexpected message type {kind}")),
            )?;
            continue;
        }
        let response = serde_json::from_slice::<BatchRequest>(&payload)
            .map_err(Error::from)
            .and_then(|req| pool.install(|| build_batch(&req, defaults)));
        match response {
            Ok(body) => write_message(&mut writer, MSG_BATCH, &body)?,
            Err(e) => write_message(&mut writer, MSG_ERROR, &error_payload(&e.to_string()))?,
        }
    }
}

/// Listening server; each connection gets its own thread, generation runs
/// on one shared pool.
pub struct Server {
    listener: TcpListener,
    config: Arc<ServerConfig>,
    pool: Arc<rayon::ThreadPool>,
    stop: Arc<AtomicBool>,
}

impl Server {
    pub fn bind<A: ToSocketAddrs>(addr: A, config: ServerConfig) -> Result<Server> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| Error::invalid("workers", e.to_string()))?;
        Ok(Server {
            listener: TcpListener::bind(addr)?,
            config: Arc::new(config),
            pool: Arc::new(pool),
            stop: Arc::new(AtomicBool::new(false)),
        })
    }

    pub fn local_addr(&self) -> Result<SocketAddr> {
        Ok(self.listener.local_addr()?)
    }

    /// Accepts connections until stopped through a [`ServerHandle`].
    pub fn run(self) -> Result<()> {
        for stream in self.listener.incoming() {
            if self.stop.load(Ordering::SeqCst) {
                break;
            }
            let Ok(stream) = stream else { continue };
            let config = Arc::clone(&self.config);
            let pool = Arc::clone(&self.pool);
            thread::spawn(move || {
                let _ = handle_connection(stream, &config, &pool);
            });
        }
        Ok(())
    }

    /// Runs on a background thread.
    pub fn spawn(self) -> Result<ServerHandle> {
        let addr = self.local_addr()?;
        let stop = Arc::clone(&self.stop);
        let thread = thread::spawn(move || self.run());
        Ok(ServerHandle {
            addr,
            stop,
            thread: Some(thread),
        })
    }
}

pub struct ServerHandle {
    pub addr: SocketAddr,
    stop: Arc<AtomicBool>,
    thread: Option<thread::JoinHandle<Result<()>>>,
}

impl ServerHandle {
    pub fn shutdown(mut self) -> Result<()> {
        self.stop_and_join()
    }

    fn stop_and_join(&mut self) -> Result<()> {
        self.stop.store(true, Ordering::SeqCst);
        // Wake the accept loop.
        let _ = TcpStream::connect(self.addr);
        match self.thread.take() {
            Some(t) => t.join().map_err(|_| Error::Protocol("server thread panicked".into()))?,
            None => Ok(()),
        }
    }
}

impl Drop for ServerHandle {
    fn drop(&mut self) {
        let _ = self.stop_and_join();
    }
}

/// Serves forever on `0.0.0.0:port`.
pub fn serve(port: u16, config: ServerConfig) -> Result<()> {
    Server::bind(("0.0.0.0", port), config)?.run()
}

/// Minimal blocking client.
pub struct Client {
    stream: TcpStream,
}

impl Client {
    pub fn connect<A: ToSocketAddrs>(addr: A) -> Result<Client> {
        Ok(Client {
            stream: TcpStream::connect(addr)?,
        })
    }

    /// Sends a request and returns the raw response `(type, payload)`.
    pub fn request_raw(&mut self, request: &BatchRequest) -> Result<(u8, Vec<u8>)> {
        write_message(&mut self.stream, MSG_REQUEST, &serde_json::to_vec(request)?)?;
        read_message(&mut self.stream, u32::MAX)?.ok_or_else(|| Error::Protocol("connection closed".into()))
    }

    pub fn request(&mut self, request: &BatchRequest) -> Result<Batch> {
        match self.request_raw(request)? {
            (MSG_BATCH, payload) => parse_batch(&payload),
            (MSG_ERROR, payload) => Err(Error::Protocol(String::from_utf8_lossy(&payload).into_owned())),
            (kind, _) => Err(Error::Protocol(format!("unexpected message type {kind}"))),
        }
    }

    pub fn stream(&mut self) -> &mut TcpStream {
        &mut self.stream
    }
}
