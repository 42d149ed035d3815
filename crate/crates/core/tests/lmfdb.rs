use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Instant;

use galorb::error::Error;
use galorb::lmfdb::{compare, fixture_keys, fixture_text, read_cache, Anomaly, Client, DataSource, OrbitFile, Source};

const BUDGET: u64 = 2_000_000;

/// Serves `bodies` in order, one per connection, recording request lines.
fn serve(bodies: Vec<(u16, String)>) -> (String, Arc<Mutex<Vec<(String, Instant)>>>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/api/mf_newforms/", listener.local_addr().unwrap());
    let seen = Arc::new(Mutex::new(Vec::new()));
    let log = seen.clone();
    thread::spawn(move || {
        for (status, body) in bodies {
            let (mut stream, _) = listener.accept().unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut line = String::new();
            reader.read_line(&mut line).unwrap();
            log.lock().unwrap().push((line.trim().to_string(), Instant::now()));
            loop {
                let mut h = String::new();
                reader.read_line(&mut h).unwrap();
                if h == "\r\n" || h.is_empty() {
                    break;
                }
            }
            let reply = format!(
                "HTTP/1.1 {status} X\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{body}",
                body.len()
            );
            stream.write_all(reply.as_bytes()).unwrap();
            let _ = stream.read(&mut [0u8; 1]);
        }
    });
    (url, seen)
}

fn row(label: &str, dim: u64, cm: bool) -> String {
    format!(r#"{{"label":"{label}","dim":{dim},"is_cm":{cm},"atkin_lehner_eigenvals":[[11,-1]]}}"#)
}

#[test]
fn fixtures_round_trip_and_validate() {
    assert_eq!(fixture_keys().len(), 10);
    for (n, k) in fixture_keys() {
        let text = fixture_text(n, k).unwrap();
        let f = OrbitFile::parse(text).unwrap();
        assert_eq!((f.level, f.weight), (n, k));
        assert!(f.orbits.iter().all(|o| o.dim >= 1 && o.label.starts_with(&format!("{n}.{k}."))));
        assert_eq!(f.to_json(), text);
        assert!(text.ends_with('\n'));
    }
}

#[test]
fn fixture_comparisons() {
    let client = Client::new("http://127.0.0.1:9/");
    for n in [1u64, 9, 11, 30, 256] {
        for k in [12u32, 16] {
            let r = compare(&client, n, k, &Source::Fixture, BUDGET).unwrap();
            assert_eq!(r.source, DataSource::Fixture);
            assert_eq!(r.ncm + r.cm_count, r.orbit_count);
            assert_eq!(r.satisfied, r.bound.bound <= r.ncm);
            if k >= 16 && r.bound.rigorous && !r.satisfied {
                // Only the registered p = 3 table entries may break the bound,
                // and the enumerated bound must still hold.
                match &r.anomalies[..] {
                    [Anomaly::BoundExceedsNcm { known_discrepancies, derived_satisfied, .. }] => {
                        assert!(!known_discrepancies.is_empty(), "N={n} k={k}");
                        assert_eq!(*derived_satisfied, Some(true));
                    }
                    other => panic!("N={n} k={k}: {other:?}"),
                }
            }
        }
    }
}

#[test]
fn level_256_gap() {
    let r = compare(&Client::new("http://127.0.0.1:9/"), 256, 12, &Source::Fixture, BUDGET).unwrap();
    assert_eq!(r.ncm, 12);
    assert_eq!(r.dims, vec![2, 2, 4, 4, 6, 6, 8, 8, 8, 10, 10, 12]);
    assert!(r.satisfied);
    assert!(matches!(r.anomalies[..], [Anomaly::NcmExceedsBound { gap: 2 }]));
}

#[test]
fn missing_fixture_is_an_error() {
    let client = Client::new("http://127.0.0.1:9/");
    assert!(matches!(compare(&client, 13, 12, &Source::Fixture, BUDGET), Err(Error::MissingFixture { .. })));
}

#[test]
fn live_pagination_then_cache() {
    let page1 = format!(r#"{{"data":[{},{}],"next":"/api/mf_newforms/?_offset=2"}}"#, row("11.12.a.a", 1, false), row("11.12.a.b", 3, false));
    let page2 = format!(r#"{{"data":[{}],"next":null}}"#, row("11.12.a.c", 4, true));
    let (url, seen) = serve(vec![(200, page1), (200, page2)]);
    let client = Client::new(url);
    let dir = tempfile::tempdir().unwrap();
    let source = Source::Live { cache_dir: Some(dir.path().to_path_buf()) };

    let r = compare(&client, 11, 12, &source, BUDGET).unwrap();
    assert_eq!(r.source, DataSource::Live);
    assert_eq!((r.orbit_count, r.ncm, r.dims.clone()), (3, 2, vec![1, 3]));

    let log = seen.lock().unwrap().clone();
    assert_eq!(log.len(), 2);
    assert!(log[0].0.contains("level=i11") && log[0].0.contains("weight=i12") && log[0].0.contains("_offset=0"));
    assert!(log[1].0.contains("_offset=2"));
    assert!(log[1].1.duration_since(log[0].1).as_millis() >= 450, "requests not spaced");

    let cached = read_cache(dir.path(), 11, 12).unwrap().unwrap();
    assert_eq!(cached.orbits.len(), 3);
    // The server is gone; the cache answers.
    let again = compare(&client, 11, 12, &source, BUDGET).unwrap();
    assert_eq!(again.source, DataSource::Cache);
    assert_eq!(again.dims, r.dims);
}

#[test]
fn http_error_is_transport() {
    let (url, _) = serve(vec![(503, "busy".into())]);
    let err = compare(&Client::new(url), 11, 12, &Source::Live { cache_dir: None }, BUDGET).unwrap_err();
    assert!(matches!(err, Error::Transport(_)), "{err}");
}

#[test]
fn malformed_payload_names_field() {
    let (url, _) = serve(vec![(200, r#"{"data":[{"label":"11.12.a.a","dim":1}]}"#.into())]);
    match compare(&Client::new(url), 11, 12, &Source::Live { cache_dir: None }, BUDGET) {
        Err(Error::Parse { field, .. }) => assert_eq!(field, "data[0].is_cm"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn wrong_level_is_rejected() {
    let (url, _) = serve(vec![(200, format!(r#"{{"data":[{}]}}"#, row("12.12.a.a", 1, false)))]);
    assert!(compare(&Client::new(url), 11, 12, &Source::Live { cache_dir: None }, BUDGET).is_err());
}

#[test]
fn connection_refused_is_transport() {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/", listener.local_addr().unwrap());
    drop(listener);
    let err = compare(&Client::new(url), 11, 12, &Source::Live { cache_dir: None }, BUDGET).unwrap_err();
    assert!(matches!(err, Error::Transport(_)), "{err}");
}
