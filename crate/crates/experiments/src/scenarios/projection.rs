use vardir_elimination::{approx_projection_with, buchberger, elimination_ideal, ideal_membership, GroebnerBasis, ProjectionOptions};
use vardir_poly::{ratio, write_polynomial, Polynomial, PolySystem, Rational};
use vardir_variety::{write_variety, Tci, Variety, RANK_TOL};

use super::sphere_poly;
use crate::config::ProjectionDemoParams;
use crate::dag::{Plan, StepError, StepOutput};

type P = Polynomial<Rational>;

fn var(n: usize, i: usize) -> P {
    Polynomial::variable(n, i)
}

fn one(n: usize) -> P {
    Polynomial::constant(n, ratio(1, 1))
}

/// S-pair closure plus membership of every elimination output in the ideal it
/// came from.
fn groebner_checks(out: &mut StepOutput, gb: &GroebnerBasis, drop_var: usize) -> Result<Vec<P>, StepError> {
    out.measure("basis", gb.basis().iter().map(write_polynomial).collect::<Vec<_>>());
    out.measure("order", gb.order());
    out.check("s-pairs-reduce", gb.s_pairs_reduce_to_zero(), format!("{} basis elements", gb.len()));
    let elim = elimination_ideal(gb, drop_var)?;
    let mut member = true;
    for p in &elim {
        member &= !p.depends_on(drop_var) && ideal_membership(p, gb)?;
    }
    out.measure("elimination", elim.iter().map(write_polynomial).collect::<Vec<_>>());
    out.check("elimination-membership", member, format!("{} eliminants", elim.len()));
    Ok(elim)
}

pub(super) fn plan(p: &ProjectionDemoParams, seed: u64) -> Plan {
    let mut plan = Plan::new();
    plan.add("groebner linear", &[], |_| {
        let (x, y) = (var(2, 0), var(2, 1));
        let gens = vec![&x - &one(2), &y - &one(2)];
        let gb = buchberger(&PolySystem::new(gens.clone())?, &[1, 0])?;
        let mut out = StepOutput::new();
        let elim = groebner_checks(&mut out, &gb, 1)?;
        out.check("own-basis", gb.len() == 2 && gens.iter().all(|g| gb.basis().contains(g)), "");
        out.check("eliminates-to-x-1", elim == vec![&x - &one(2)], "");
        Ok(out)
    });
    plan.add("groebner unit", &[], |_| {
        let (x, y) = (var(2, 0), var(2, 1));
        let gb = buchberger(&PolySystem::new(vec![&(&x * &y) - &one(2), &x * &x])?, &[1, 0])?;
        let mut out = StepOutput::new();
        groebner_checks(&mut out, &gb, 1)?;
        out.check("unit-ideal", gb.is_unit() && gb.basis() == [one(2)], "");
        out.check("contains-x", ideal_membership(&x, &gb)?, "");
        Ok(out)
    });
    plan.add("groebner saddle", &[], |_| {
        let (x, y, z) = (var(3, 0), var(3, 1), var(3, 2));
        let gb = buchberger(&PolySystem::new(vec![&z - &(&x * &y), sphere_poly()])?, &[2, 1, 0])?;
        let quartic = &(&(&(&x * &x) + &(&y * &y)) + &(&(&x * &x) * &(&y * &y))) - &one(3);
        let mut out = StepOutput::new();
        let elim = groebner_checks(&mut out, &gb, 2)?;
        out.check("basis-has-quartic", gb.basis().contains(&quartic), "");
        out.check("eliminates-to-quartic", elim == vec![quartic], "");
        Ok(out)
    });
    for c in &p.cases {
        let (c, budget, audit_samples) = (c.clone(), p.budget, p.audit_samples);
        plan.add(format!("projection {}", c.label), &[], move |_| {
            let second = c.poly.parse(3)?;
            let z = Tci::certify(Variety::new(PolySystem::new(vec![sphere_poly(), second])?, 1)?, 64, RANK_TOL, 1)?;
            let opts = ProjectionOptions { budget, audit_samples, seed, ..ProjectionOptions::default() };
            let proj = approx_projection_with(&z, c.s, &opts)?;
            let mut out = StepOutput::new();
            out.measure("s", c.s);
            out.measure("audit", proj.audit);
            out.measure("sampled", proj.u_count);
            out.measure("shear", proj.shear.iter().map(|d| d.to_string()).collect::<Vec<_>>());
            out.measure("groebner_len", proj.groebner_len);
            out.measure("groebner_degree", proj.groebner_degree);
            out.measure("degree", proj.degree);
            out.measure("count", proj.count);
            out.measure("over_budget", proj.over_budget);
            out.check("audit-below-2s", proj.audit < 2.0 * c.s, format!("audit {:.3e} on {} points against {}", proj.audit, proj.u_count, 2.0 * c.s));
            out.file(format!("projection-{}.txt", c.label), write_variety(&proj.w).into_bytes());
            Ok(out)
        });
    }
    plan
}
