use std::ffi::{CStr, CString};
use std::ptr;

use ldpc_streams::code::fixtures::h_10_5;
use ldpc_streams::{decode, emit_alist, AwgnChannel, DecoderConfig};
use ldpc_streams_ffi::*;

fn fixture() -> *mut LdpcCode {
    let dense: Vec<u8> = h_10_5().to_dense().concat();
    let mut code = ptr::null_mut();
    let st = unsafe { ldpc_code_from_dense(dense.as_ptr(), 5, 10, &mut code) };
    assert_eq!(st, LdpcStatus::Ok);
    code
}

fn last_error() -> String {
    let p = ldpc_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn code_dimensions_and_alist_round_trip() {
    let code = fixture();
    unsafe {
        assert_eq!(
            (
                ldpc_code_n(code),
                ldpc_code_m(code),
                ldpc_code_num_edges(code)
            ),
            (10, 5, 20)
        );
        let mut text = ptr::null_mut();
        assert_eq!(ldpc_code_to_alist(code, &mut text), LdpcStatus::Ok);
        let s = CStr::from_ptr(text).to_str().unwrap().to_owned();
        assert_eq!(s, emit_alist(&h_10_5()));

        let mut again = ptr::null_mut();
        assert_eq!(ldpc_code_from_alist(text, &mut again), LdpcStatus::Ok);
        assert_eq!(ldpc_code_num_edges(again), 20);
        ldpc_string_free(text);
        ldpc_code_free(again);
        ldpc_code_free(code);
        assert_eq!(ldpc_code_n(ptr::null()), 0);
    }
}

#[test]
fn errors_map_to_status_codes() {
    unsafe {
        let bad = CString::new("10 5\n2 4\n").unwrap();
        let mut code = ptr::null_mut();
        assert_eq!(
            ldpc_code_from_alist(bad.as_ptr(), &mut code),
            LdpcStatus::Format
        );
        assert!(last_error().contains("line"));
        assert!(code.is_null());

        assert_eq!(
            ldpc_code_generate(10, 2, 3, 1, &mut code),
            LdpcStatus::Infeasible
        );
        assert_eq!(
            ldpc_code_from_alist(ptr::null(), &mut code),
            LdpcStatus::NullPointer
        );
        assert!(last_error().contains("text"));

        let zero_col = [1u8, 0, 1, 0];
        assert_eq!(
            ldpc_code_from_dense(zero_col.as_ptr(), 2, 2, &mut code),
            LdpcStatus::Degenerate
        );

        let fixture = fixture();
        let cfg = LdpcDecoderConfig {
            max_iterations: 0,
            ..ldpc_decoder_config_default()
        };
        let llr = [1.0; 10];
        let mut bits = [0u8; 10];
        let st = ldpc_decode(
            fixture,
            &cfg,
            llr.as_ptr(),
            10,
            bits.as_mut_ptr(),
            ptr::null_mut(),
            ptr::null_mut(),
        );
        assert_eq!(st, LdpcStatus::Config);
        let cfg = ldpc_decoder_config_default();
        let st = ldpc_decode(
            fixture,
            &cfg,
            llr.as_ptr(),
            9,
            bits.as_mut_ptr(),
            ptr::null_mut(),
            ptr::null_mut(),
        );
        assert_eq!(st, LdpcStatus::Dimension);
        ldpc_code_free(fixture);
    }
}

#[test]
fn syndrome_and_decode_match_library() {
    let code = fixture();
    let lib = h_10_5();
    let ch = AwgnChannel::new(2.0, 0.6, 3).unwrap();
    let cfg = ldpc_decoder_config_default();
    unsafe {
        let mut e0 = [0u8; 10];
        e0[0] = 1;
        let mut syn = [9u8; 5];
        assert_eq!(
            ldpc_code_syndrome(code, e0.as_ptr(), 10, syn.as_mut_ptr()),
            LdpcStatus::Ok
        );
        assert_eq!(syn.to_vec(), lib.syndrome(&e0).unwrap());

        for i in 0..20 {
            let llr = ch.llr_frame(&[0; 10], i);
            let expected = decode(&lib, &llr, &DecoderConfig::default()).unwrap();
            let (mut bits, mut its, mut ok) = ([0u8; 10], 0usize, false);
            let st = ldpc_decode(
                code,
                &cfg,
                llr.as_ptr(),
                10,
                bits.as_mut_ptr(),
                &mut its,
                &mut ok,
            );
            assert_eq!(st, LdpcStatus::Ok);
            assert_eq!(
                (bits.to_vec(), its, ok),
                (expected.bits, expected.iterations_run, expected.syndrome_ok)
            );
        }
        ldpc_code_free(code);
    }
}

#[test]
fn batch_matches_single_frame_decoding() {
    let code = fixture();
    let ch = AwgnChannel::new(1.0, 0.6, 4).unwrap();
    let frames = 7;
    let llrs: Vec<f64> = (0..frames)
        .flat_map(|i| ch.llr_frame(&[0; 10], i).into_inner())
        .collect();
    let mut cfg = ldpc_decoder_config_default();
    cfg.schedule = LdpcSchedule::Flooding;
    cfg.early_termination = true;
    unsafe {
        let mut bits = vec![0u8; frames as usize * 10];
        let mut its = vec![0usize; frames as usize];
        let mut ok = vec![false; frames as usize];
        let st = ldpc_decode_batch(
            code,
            &cfg,
            llrs.as_ptr(),
            frames as usize,
            bits.as_mut_ptr(),
            its.as_mut_ptr(),
            ok.as_mut_ptr(),
        );
        assert_eq!(st, LdpcStatus::Ok);
        for s in 0..frames as usize {
            let (mut b, mut it, mut k) = ([0u8; 10], 0usize, false);
            ldpc_decode(
                code,
                &cfg,
                llrs[s * 10..].as_ptr(),
                10,
                b.as_mut_ptr(),
                &mut it,
                &mut k,
            );
            assert_eq!(&bits[s * 10..(s + 1) * 10], &b);
            assert_eq!((its[s], ok[s]), (it, k));
        }
        ldpc_code_free(code);
    }
}

#[test]
fn interleave_round_trip() {
    let (f, n) = (3usize, 4usize);
    let frames: Vec<f64> = (0..f * n).map(|x| x as f64).collect();
    let mut mixed = vec![0.0; f * n];
    let mut back = vec![0.0; f * n];
    unsafe {
        assert_eq!(
            ldpc_interleave(frames.as_ptr(), f, n, mixed.as_mut_ptr()),
            LdpcStatus::Ok
        );
        assert_eq!(&mixed[..f], &[0.0, 4.0, 8.0]);
        assert_eq!(
            ldpc_deinterleave(mixed.as_ptr(), f, n, back.as_mut_ptr()),
            LdpcStatus::Ok
        );
        assert_eq!(
            ldpc_interleave(frames.as_ptr(), 0, n, mixed.as_mut_ptr()),
            LdpcStatus::InvalidArgument
        );
    }
    assert_eq!(back, frames);
}

#[test]
fn engine_lifecycle() {
    let code = fixture();
    let cfg = ldpc_decoder_config_default();
    let stream = LdpcStreamConfig {
        streams: 2,
        batch: 4,
        queue_depth: 2,
        backpressure: LdpcBackpressure::Block,
    };
    let ch = AwgnChannel::new(3.0, 0.6, 5).unwrap();
    unsafe {
        let mut engine = ptr::null_mut();
        assert_eq!(
            ldpc_engine_start(code, &cfg, &stream, &mut engine),
            LdpcStatus::Ok
        );
        // the engine holds its own reference
        ldpc_code_free(code);

        let mut submitted = Vec::new();
        for j in 0..10u64 {
            let count = 1 + (j as usize % 4);
            let llrs: Vec<f64> = (0..count as u64)
                .flat_map(|s| ch.llr_frame(&[0; 10], j * 4 + s).into_inner())
                .collect();
            let mut id = u64::MAX;
            assert_eq!(
                ldpc_engine_submit(engine, llrs.as_ptr(), count, &mut id),
                LdpcStatus::Ok
            );
            submitted.push((id, count));
        }
        let too_many = vec![0.0; 50];
        assert_eq!(
            ldpc_engine_submit(engine, too_many.as_ptr(), 5, ptr::null_mut()),
            LdpcStatus::Dimension
        );

        let mut seen = Vec::new();
        let mut bits = vec![0u8; 40];
        let mut its = vec![0usize; 4];
        loop {
            let (mut id, mut frames) = (0u64, 0usize);
            let st = ldpc_engine_collect(
                engine,
                -1,
                &mut id,
                &mut frames,
                bits.as_mut_ptr(),
                its.as_mut_ptr(),
                ptr::null_mut(),
            );
            if st == LdpcStatus::Empty {
                break;
            }
            assert_eq!(st, LdpcStatus::Ok);
            seen.push((id, frames));
        }
        seen.sort_unstable();
        assert_eq!(seen, submitted);

        let mut summary = LdpcShutdownSummary::default();
        assert_eq!(
            ldpc_engine_shutdown(engine, true, &mut summary),
            LdpcStatus::Ok
        );
        assert_eq!(
            (summary.accepted, summary.completed, summary.cancelled),
            (10, 10, 0)
        );
        let one = [0.0; 10];
        assert_eq!(
            ldpc_engine_submit(engine, one.as_ptr(), 1, ptr::null_mut()),
            LdpcStatus::EngineStopped
        );
        assert_eq!(
            ldpc_engine_collect(
                engine,
                0,
                ptr::null_mut(),
                ptr::null_mut(),
                bits.as_mut_ptr(),
                ptr::null_mut(),
                ptr::null_mut()
            ),
            LdpcStatus::Empty
        );
        ldpc_engine_free(engine);
    }
}

#[test]
fn engine_reject_and_cancel() {
    let code = fixture();
    let cfg = ldpc_decoder_config_default();
    let stream = LdpcStreamConfig {
        streams: 1,
        batch: 1,
        queue_depth: 2,
        backpressure: LdpcBackpressure::Reject,
    };
    unsafe {
        let mut engine = ptr::null_mut();
        assert_eq!(
            ldpc_engine_start(code, &cfg, &stream, &mut engine),
            LdpcStatus::Ok
        );
        assert_eq!(ldpc_engine_pause(engine), LdpcStatus::Ok);
        let llr = [2.0; 10];
        for _ in 0..2 {
            assert_eq!(
                ldpc_engine_submit(engine, llr.as_ptr(), 1, ptr::null_mut()),
                LdpcStatus::Ok
            );
        }
        assert_eq!(
            ldpc_engine_submit(engine, llr.as_ptr(), 1, ptr::null_mut()),
            LdpcStatus::QueueFull
        );
        let mut summary = LdpcShutdownSummary::default();
        ldpc_engine_shutdown(engine, false, &mut summary);
        assert_eq!(
            (summary.accepted, summary.completed, summary.cancelled),
            (2, 0, 2)
        );
        ldpc_engine_free(engine);
        ldpc_engine_free(ptr::null_mut());
        ldpc_code_free(code);
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/include/ldpc_streams.h"
    ))
    .unwrap();
    for name in [
        "ldpc_last_error",
        "ldpc_decoder_config_default",
        "ldpc_stream_config_default",
        "ldpc_code_from_alist",
        "ldpc_code_from_dense",
        "ldpc_code_generate",
        "ldpc_code_free",
        "ldpc_code_n",
        "ldpc_code_m",
        "ldpc_code_num_edges",
        "ldpc_code_to_alist",
        "ldpc_string_free",
        "ldpc_code_syndrome",
        "ldpc_decode",
        "ldpc_decode_batch",
        "ldpc_interleave",
        "ldpc_deinterleave",
        "ldpc_engine_start",
        "ldpc_engine_submit",
        "ldpc_engine_collect",
        "ldpc_engine_pause",
        "ldpc_engine_resume",
        "ldpc_engine_shutdown",
        "ldpc_engine_free",
        "typedef struct LdpcCode LdpcCode",
        "LDPC_STATUS_QUEUE_FULL = 10",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}
