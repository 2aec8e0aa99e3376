//! On-disk formats consumed by downstream tools: diagnostics CSV and binary snapshots.

use gmhd::diagnostics::{DiagnosticsRecord, N_COLUMNS};
use gmhd::io::csv::{diagnostics_header, fmt_g17, read_diagnostics, write_diagnostics, write_symbol};
use gmhd::io::snapshot::{snapshot_name, Snapshot, SnapshotError, HEADER_LEN, MAGIC};
use proptest::prelude::*;

#[test]
fn csv_header_is_fixed() {
    assert_eq!(
        diagnostics_header(),
        "t,energy_u,energy_b,diss_u_cum,diss_b_cum,enstrophy,current_sq,grad_j_cum,\
lp_omega_2,lp_omega_4,lp_omega_8,lp_omega_inf,lp_j_2,lp_j_4,lp_j_8,lp_j_inf,\
b_inf,grad_b_lp,g_l2,g_inf,f_inf,d_total,bkm_integral,tail_ratio,d_total_cum"
    );
}

#[test]
fn symbol_csv_layout() {
    let mut buf = Vec::new();
    write_symbol(&mut buf, [(0.0, 0.0), (1.0, std::f64::consts::TAU), (2f64.sqrt(), 1e-20)]).unwrap();
    assert_eq!(
        String::from_utf8(buf).unwrap(),
        "kappa,sigma\n0,0\n1,6.2831853071795862\n1.4142135623730951,9.9999999999999995e-21\n"
    );
}

#[test]
fn snapshot_header_layout() {
    let n = 6;
    let s = Snapshot { n, t: -0.75, omega: vec![1.0; n * n], j: vec![2.0; n * n] };
    let b = s.to_bytes();
    assert_eq!(b.len(), 28 + 16 * n * n);
    assert_eq!(HEADER_LEN, 28);
    assert_eq!(&b[..8], &MAGIC);
    assert_eq!(&b[..7], b"GMHD2D\0");
    assert_eq!(u32::from_le_bytes(b[8..12].try_into().unwrap()), 1);
    assert_eq!(u32::from_le_bytes(b[12..16].try_into().unwrap()), n as u32);
    assert_eq!(u32::from_le_bytes(b[16..20].try_into().unwrap()), 0);
    assert_eq!(f64::from_le_bytes(b[20..28].try_into().unwrap()), -0.75);
    assert_eq!(f64::from_le_bytes(b[28..36].try_into().unwrap()), 1.0);
    assert_eq!(f64::from_le_bytes(b[28 + 8 * n * n..36 + 8 * n * n].try_into().unwrap()), 2.0);
    assert_eq!(snapshot_name(7), "snap_000007.bin");
}

#[test]
fn snapshot_with_inconsistent_size_is_corrupt() {
    let s = Snapshot { n: 4, t: 0.0, omega: vec![0.0; 16], j: vec![0.0; 16] };
    let mut b = s.to_bytes();
    b.extend_from_slice(&[0; 8]);
    assert!(matches!(Snapshot::from_bytes(&b), Err(SnapshotError::Corrupt(_))));
    let mut zero_n = s.to_bytes();
    zero_n[12..16].copy_from_slice(&0u32.to_le_bytes());
    assert!(matches!(Snapshot::from_bytes(&zero_n), Err(SnapshotError::Corrupt(_))));
}

#[test]
fn csv_rejects_foreign_input() {
    assert!(read_diagnostics(&b"t,energy\n1,2\n"[..]).is_err());
    let short = format!("{}\n1,2,3\n", diagnostics_header());
    assert!(read_diagnostics(short.as_bytes()).is_err());
    assert!(read_diagnostics(&b""[..]).is_err());
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![any::<f64>().prop_filter("finite", |x| x.is_finite()), Just(0.0), Just(-0.0), Just(f64::MIN_POSITIVE)]
}

proptest! {
    #[test]
    fn g17_round_trips_every_finite_double(x in finite()) {
        prop_assert_eq!(fmt_g17(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
    }

    #[test]
    fn records_round_trip_losslessly(vals in prop::collection::vec(finite(), N_COLUMNS)) {
        let arr: [f64; N_COLUMNS] = vals.try_into().unwrap();
        let r = DiagnosticsRecord::from_values(&arr);
        let mut buf = Vec::new();
        write_diagnostics(&mut buf, &[r]).unwrap();
        let back = read_diagnostics(buf.as_slice()).unwrap();
        let got = back[0].values();
        for (a, b) in got.iter().zip(arr.iter()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn snapshots_round_trip(n in 1usize..9, t in finite(), seed in any::<u64>()) {
        let omega: Vec<f64> = (0..n * n).map(|i| (seed.wrapping_mul(i as u64 + 1) as f64).sin()).collect();
        let j: Vec<f64> = omega.iter().map(|v| -v * 1e-7).collect();
        let s = Snapshot { n, t, omega, j };
        let b = s.to_bytes();
        prop_assert_eq!(b.len(), Snapshot::file_len(n));
        prop_assert_eq!(Snapshot::from_bytes(&b).unwrap(), s);
    }
}
