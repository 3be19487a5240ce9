use chronomesh::field::TimeSeriesField;
use chronomesh::mesh::regular::RegularSpacetimeMesh;
use chronomesh::track::critical::{track_critical, CriticalConfig, CriticalDomain, CriticalField};

fn main() {
    let mesh = RegularSpacetimeMesh::new(&[5, 5], 2).unwrap();
    // Static affine field with the zero resting on the midpoint of the
    // horizontal edge (1,2)-(2,2).
    let c = [1.5f64, 2.0];
    let a = [[2i64, -1], [1, 3]];
    let mut field = TimeSeriesField::new(25, 2);
    for _layer in 0..2 {
        let mut layer = Vec::with_capacity(50);
        for y in 0..5 {
            for x in 0..5 {
                let dx = x as f64 - c[0];
                let dy = y as f64 - c[1];
                layer.push(a[0][0] as f64 * dx + a[0][1] as f64 * dy);
                layer.push(a[1][0] as f64 * dx + a[1][1] as f64 * dy);
            }
        }
        field.push_layer(layer).unwrap();
    }
    match track_critical(
        &CriticalDomain::Grid(&mesh),
        &CriticalField::Vector(&field),
        &CriticalConfig::default(),
    ) {
        Err(e) => println!("ERROR: {e}"),
        Ok(r) => {
            println!("detections={} diag={:?} trajs={}", r.detections, r.diagnostics, r.trajectories.len());
            for (ti, t) in r.trajectories.iter().enumerate() {
                println!("trajectory {ti}: id={} closed={}", t.id, t.closed);
                for p in &t.points {
                    println!(
                        "  t={:.3} pos=({:.3},{:.3}) kind={:?} handle={}",
                        p.time, p.position[0], p.position[1], p.kind, p.handle.to_token()
                    );
                }
            }
        }
    }
}
