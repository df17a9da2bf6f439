use std::io::{Read, Write};
use std::net::TcpStream;

use sigforge::dataset::{generate_example, to_stored, DatasetConfig, PlanItem, Variant};
use sigforge::server::{
    encode_header, read_message, BatchRequest, Client, Server, ServerConfig, MAX_BATCH, MSG_BATCH, MSG_ERROR,
};

fn start() -> sigforge::server::ServerHandle {
    let config = ServerConfig {
        frame_len: 512,
        workers: 2,
        ..ServerConfig::default()
    };
    Server::bind("127.0.0.1:0", config).unwrap().spawn().unwrap()
}

#[test]
fn batches_match_direct_generation() {
    let server = start();
    let mut client = Client::connect(server.addr).unwrap();
    let batch = client.request(&BatchRequest::new(6, 42, 1000)).unwrap();
    let cfg = DatasetConfig::new(Variant::ImpairedTrain, 6, 42).with_frame_len(512);
    for (k, (frame, meta)) in batch.frames.iter().zip(&batch.metas).enumerate() {
        let (expected, expected_meta) = generate_example(&PlanItem::new(42, 1000 + k as u64), &cfg).unwrap();
        assert_eq!(to_stored(frame), to_stored(&expected));
        assert_eq!(*meta, expected_meta);
    }
}

#[test]
fn advancing_start_index_gives_disjoint_examples() {
    let server = start();
    let mut client = Client::connect(server.addr).unwrap();
    let a = client.request(&BatchRequest::new(4, 3, 0)).unwrap();
    let b = client.request(&BatchRequest::new(4, 3, 4)).unwrap();
    let both = client.request(&BatchRequest::new(8, 3, 0)).unwrap();
    assert_eq!([a.frames.clone(), b.frames.clone()].concat(), both.frames);
    assert!(a.metas.iter().all(|m| m.index < 4));
    assert!(b.metas.iter().all(|m| (4..8).contains(&m.index)));
}

#[test]
fn concurrent_clients_receive_identical_bytes() {
    let server = start();
    let addr = server.addr;
    let req = BatchRequest {
        variant: Some(Variant::ImpairedVal),
        ..BatchRequest::new(16, 9, 77)
    };
    let payloads: Vec<_> = (0..3)
        .map(|_| {
            let req = req.clone();
            std::thread::spawn(move || Client::connect(addr).unwrap().request_raw(&req).unwrap())
        })
        .collect::<Vec<_>>()
        .into_iter()
        .map(|h| h.join().unwrap())
        .collect();
    assert_eq!(payloads[0].0, MSG_BATCH);
    assert!(payloads.iter().all(|p| *p == payloads[0]));
}

#[test]
fn bad_magic_closes_with_error() {
    let server = start();
    let mut stream = TcpStream::connect(server.addr).unwrap();
    let mut header = encode_header(1, 2);
    header[..4].copy_from_slice(b"XXXX");
    stream.write_all(&header).unwrap();
    stream.write_all(b"{}").unwrap();
    let (kind, payload) = read_message(&mut stream, u32::MAX).unwrap().unwrap();
    assert_eq!(kind, MSG_ERROR);
    assert!(String::from_utf8_lossy(&payload).contains("magic"));
    let mut rest = Vec::new();
    assert_eq!(stream.read_to_end(&mut rest).unwrap_or(0), 0);
}

#[test]
fn oversize_batch_gets_error_frame_and_connection_survives() {
    let server = start();
    let mut client = Client::connect(server.addr).unwrap();
    let (kind, _) = client.request_raw(&BatchRequest::new(MAX_BATCH + 1, 1, 0)).unwrap();
    assert_eq!(kind, MSG_ERROR);
    let batch = client.request(&BatchRequest::new(2, 1, 0)).unwrap();
    assert_eq!(batch.frames.len(), 2);
}
