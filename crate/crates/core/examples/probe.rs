fn main() {
    use gausslab::approx::*;
    use gausslab::targets::TargetFunction;
    use gausslab::gauss;
    let rule = gausslab::quadrature::gauss_hermite_rule(400).unwrap();
    let e = expand_target(&TargetFunction::relu(), 50, &rule).unwrap();
    // independent oracle: composite Simpson of x H_j(x) phi(x) on [0, 14]
    for j in [2usize, 6, 10, 20, 42] {
        let n = 400_000;
        let h = 14.0 / n as f64;
        let mut s = 0.0;
        for i in 0..=n {
            let x = i as f64 * h;
            let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * x * gauss::hermite(j, x) * gauss::pdf(x);
        }
        let oracle = s * h / 3.0;
        println!("c_{j}: exact={:.12e} simpson={:.12e} diff={:.2e}", e.coefficient_uni(j as u32), oracle, (e.coefficient_uni(j as u32)-oracle).abs());
    }
    let prof = l2_error_profile(&TargetFunction::relu(), 50, &rule).unwrap();
    for d in [1usize,2,4,8,18,42] { println!("relu l2 err({d}) = {:.8}", prof[d]); }
}
