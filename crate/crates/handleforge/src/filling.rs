//! Dehn filling, fundamental-group presentations and sphere recognition.

use crate::cusps::{
    classify_cusp, enumerate_slopes, iota, kernel_of_row, pairing, periphery, slope_for_class, slope_from_path,
    slope_from_word, walk, walk_chain, walk_to_link_cycle, CuspSection, PathStep, RankedSlope, Slope,
};
use crate::error::{Error, Result};
use crate::group::{cyclic_reduce, letter_name, tietze_simplify, Letter, Move, Presentation, DEFAULT_BUDGET};
use crate::handles::{chain_complex, euler_characteristic, homology, Handle, HandleDecomposition, HandleOrigin, HomologyProfile};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Environment variable overriding [`DEFAULT_BUDGET`].
pub const BUDGET_VAR: &str = "HANDLEFORGE_BUDGET";

pub fn budget_from_env() -> usize {
    std::env::var(BUDGET_VAR).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_BUDGET)
}

/// π₁ presentation read off the 1- and 2-handles.
pub fn presentation(hd: &HandleDecomposition) -> Result<Presentation> {
    if hd.n != 3 && hd.n != 4 {
        return Err(Error::UnsupportedDimension(hd.n));
    }
    let mut relators = Vec::new();
    let mut labels = Vec::new();
    for (h, w) in hd.handles[2].iter().zip(&hd.words) {
        if let Some(w) = w {
            relators.push(cyclic_reduce(w));
            labels.push(h.id.clone());
        }
    }
    // with several 0-handles a spanning tree of 1-handles is contractible
    if hd.handles[0].len() > 1 {
        for t in hd.zero_handle_tree() {
            relators.push(vec![Letter::new(t, false)]);
            labels.push(format!("tree:{}", hd.generators[t]));
        }
    }
    Ok(Presentation { generators: hd.generators.clone(), relators, labels })
}

/// A cusp together with the slope to fill it along.
#[derive(Debug, Clone, PartialEq)]
pub struct FillingInstruction {
    pub cusp: usize,
    pub slope: Slope,
}

/// Serialized form: `{cusp, class}`, `{cusp, word}` or `{cusp, path}`, the
/// cusp named by any of its ideal vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlopeDoc {
    pub cusp: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<[i64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<Vec<PathStep>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

pub fn parse_slopes(text: &str) -> Result<Vec<SlopeDoc>> {
    serde_json::from_str(text).map_err(crate::complex::classify)
}

pub fn find_cusp<'a>(cusps: &'a [CuspSection], vertex: &str) -> Result<&'a CuspSection> {
    cusps
        .iter()
        .find(|s| s.vertices.iter().any(|v| v == vertex))
        .ok_or_else(|| Error::Cusp(format!("`{vertex}` is not an ideal vertex")))
}

pub fn instruction(hd: &HandleDecomposition, cusps: &[CuspSection], doc: &SlopeDoc) -> Result<FillingInstruction> {
    let s = find_cusp(cusps, &doc.cusp)?;
    if let Some(b) = &doc.basis {
        if b != "default" {
            return Err(Error::Slope(format!("unknown basis `{b}`")));
        }
    }
    let slope = match (&doc.class, &doc.word, &doc.path) {
        (Some(pq), None, None) => slope_for_class(hd, s, &periphery(hd, s)?, *pq)?,
        (None, Some(w), None) => slope_from_word(hd, s, &doc.cusp, w)?,
        (None, None, Some(p)) => slope_from_path(hd, s, p)?,
        _ => return Err(Error::Slope("give exactly one of class, word, path".into())),
    };
    let slope = peripheral_class(hd, s, slope)?;
    Ok(FillingInstruction { cusp: s.index, slope })
}

// Re-express H₁ coordinates in the peripheral basis for torus cusps.
fn peripheral_class(hd: &HandleDecomposition, s: &CuspSection, mut sl: Slope) -> Result<Slope> {
    if hd.n == 3 && classify_cusp(s).verdict == "torus" {
        let per = periphery(hd, s)?;
        let chain = walk_chain(hd.gluing(), s, &walk(hd.gluing(), sl.start, &sl.exits)?);
        let h = per.coordinates(&chain).ok_or_else(|| Error::Slope("slope is not closed".into()))?;
        sl.class = per.to_basis(&h).to_vec();
    }
    Ok(sl)
}

fn primitive(v: &[i64]) -> bool {
    v.iter().fold(0, |g, &x| num_integer::gcd(g, x)) == 1
}

/// Attach the handles of a solid torus (n = 3) or of T²×D² along a fiber
/// (n = 4) to each listed cusp. Several 0-handles are merged first.
pub fn fill(hd: &HandleDecomposition, cusps: &[CuspSection], instructions: &[FillingInstruction]) -> Result<HandleDecomposition> {
    let mut out = hd.clone();
    if instructions.is_empty() {
        return Ok(out);
    }
    let mut seen = Vec::new();
    for ins in instructions {
        let s = cusps.get(ins.cusp).ok_or_else(|| Error::Filling(format!("no cusp {}", ins.cusp)))?;
        if seen.contains(&ins.cusp) || out.filled.contains(&s.representative) {
            return Err(Error::Filling(format!("cusp `{}` is filled twice", s.representative)));
        }
        seen.push(ins.cusp);
        if !primitive(&ins.slope.class) {
            return Err(Error::Slope(format!("slope {:?} is not primitive", ins.slope.class)));
        }
    }
    out.merge_zero_handles();
    for ins in instructions {
        let s = &cusps[ins.cusp];
        match out.n {
            3 => fill3(&mut out, s, &ins.slope)?,
            4 => fill4(&mut out, s, &ins.slope)?,
            n => return Err(Error::UnsupportedDimension(n)),
        }
        out.filled.push(s.representative.clone());
    }
    if out.filled.len() == cusps.len() {
        out.boundary_flag = false;
    }
    chain_complex(&out)?;
    Ok(out)
}

fn filling_handle(s: &CuspSection, index: usize, part: &str) -> Handle {
    Handle {
        index,
        id: format!("fill:{}:{part}", s.representative),
        origin: HandleOrigin::Filling { cusp: s.representative.clone(), part: part.to_string() },
        cycle: None,
    }
}

fn fill3(hd: &mut HandleDecomposition, s: &CuspSection, sl: &Slope) -> Result<()> {
    let cl = classify_cusp(s);
    if cl.verdict != "torus" {
        return Err(Error::Filling(format!("cusp `{}` is a {}, not a torus", s.representative, cl.verdict)));
    }
    let g = hd.gluing.clone();
    let chain = walk_chain(&g, s, &walk(&g, sl.start, &sl.exits)?);
    let word = sl.word(hd)?;
    let col = iota(hd, s, 1, &chain);
    hd.add_handle(filling_handle(s, 2, "meridian"), col, Some(word));
    let fund = s.b_fundamental().ok_or_else(|| Error::Filling("cusp is not orientable".into()))?;
    let col = iota(hd, s, 2, &fund);
    hd.add_handle(filling_handle(s, 3, "core"), col, None);
    Ok(())
}

fn fill4(hd: &mut HandleDecomposition, s: &CuspSection, sl: &Slope) -> Result<()> {
    let g = hd.gluing.clone();
    let cr = walk(&g, sl.start, &sl.exits)?;
    let chain = walk_chain(&g, s, &cr);
    let fiber = walk_to_link_cycle(&g, s, &cr)?;
    let h2 = s.b_homology(2);
    if h2.betti != 3 {
        return Err(Error::Filling(format!("cusp `{}` is not a 3-torus", s.representative)));
    }
    let lambda = h2.free_reps.iter().map(|z| pairing(&g.complex, s, z, &fiber)).collect::<Result<Vec<i64>>>()?;
    if !primitive(&lambda) {
        return Err(Error::Slope(format!("fiber pairs with H₂ as {lambda:?}, not primitively")));
    }
    let word = sl.word(hd)?;
    let col = iota(hd, s, 1, &chain);
    hd.add_handle(filling_handle(s, 2, "fiber"), col, Some(word));
    for (i, k) in kernel_of_row(&lambda).into_iter().enumerate() {
        let mut z = vec![0; h2.free_reps[0].len()];
        for (coef, rep) in k.iter().zip(&h2.free_reps) {
            for (x, y) in z.iter_mut().zip(rep) {
                *x += coef * y;
            }
        }
        let col = iota(hd, s, 2, &z);
        hd.add_handle(filling_handle(s, 3, &format!("torus{}", i + 1)), col, None);
    }
    let fund = s.b_fundamental().ok_or_else(|| Error::Filling("cusp is not orientable".into()))?;
    let col = iota(hd, s, 3, &fund);
    hd.add_handle(filling_handle(s, 4, "core"), col, None);
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SphereReport {
    pub schema: String,
    pub n: usize,
    pub counts: Vec<usize>,
    pub euler: i64,
    pub homology: HomologyProfile,
    pub sphere_homology: bool,
    pub abelianization_trivial: bool,
    pub trivialized: bool,
    pub budget: usize,
    pub budget_exhausted: bool,
    pub remaining: crate::group::PresentationDoc,
    pub verdict: String,
    pub note: String,
    pub trace: Vec<Move>,
}

pub fn certify_sphere(hd: &HandleDecomposition, budget: usize) -> Result<SphereReport> {
    if hd.boundary_flag {
        return Err(Error::Filling("decomposition still has unfilled cusps".into()));
    }
    let pr = presentation(hd)?;
    let simp = tietze_simplify(&pr, budget);
    let (betti, torsion) = pr.abelianization();
    let hom = homology(&chain_complex(hd)?);
    let sphere = hom.is_sphere();
    let trivialized = simp.presentation.is_trivial();
    let (verdict, note) = match (hd.n, trivialized, sphere) {
        (3, true, _) => (
            "S³ (hence original manifold = link complement)",
            "π₁ is trivial; a closed simply connected 3-manifold is S³ (Perelman).",
        ),
        (4, true, true) => (
            "homotopy-4-sphere evidence",
            "π₁ is trivial and homology is that of S⁴, so the manifold is a homotopy 4-sphere and hence homeomorphic to S⁴ (Freedman); no smooth claim is made.",
        ),
        (_, false, _) if simp.exhausted => ("inconclusive", "Tietze budget exhausted before a fixpoint."),
        _ => ("not recognized", "presentation did not simplify to the trivial group."),
    };
    Ok(SphereReport {
        schema: "handleforge-sphere/1".into(),
        n: hd.n,
        counts: hd.counts(),
        euler: euler_characteristic(hd),
        homology: hom,
        sphere_homology: sphere,
        abelianization_trivial: betti == 0 && torsion.is_empty(),
        trivialized,
        budget,
        budget_exhausted: simp.exhausted,
        remaining: simp.presentation.to_doc(),
        verdict: verdict.into(),
        note: note.into(),
        trace: simp.trace,
    })
}

/// A filled cusp's meridian and a complementary longitude, the core of the
/// attached solid torus and so a component of the link.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkComponent {
    pub cusp: String,
    pub meridian_class: Vec<i64>,
    pub meridian: Vec<String>,
    pub longitude_class: Vec<i64>,
    pub longitude: Vec<String>,
}

/// The smallest class (r, s) with p·s − q·r = ±1.
pub fn complementary(class: &[i64]) -> Option<[i64; 2]> {
    let (p, q) = (class[0], class[1]);
    for span in 0..=(p.abs() + q.abs() + 1) {
        for r in -span..=span {
            for t in [-(span - r.abs()), span - r.abs()] {
                if (p * t - q * r).abs() == 1 {
                    return Some([r, t]);
                }
            }
        }
    }
    None
}

pub fn link_exterior(hd: &HandleDecomposition, cusps: &[CuspSection], instructions: &[FillingInstruction]) -> Result<Vec<LinkComponent>> {
    instructions
        .iter()
        .map(|ins| {
            let s = &cusps[ins.cusp];
            let per = periphery(hd, s)?;
            let l = complementary(&ins.slope.class).ok_or_else(|| Error::Slope("no complementary class".into()))?;
            let lon = slope_for_class(hd, s, &per, l)?;
            let names = |w: Vec<Letter>| w.iter().map(|&x| letter_name(&hd.generators, x)).collect();
            Ok(LinkComponent {
                cusp: s.representative.clone(),
                meridian_class: ins.slope.class.clone(),
                meridian: names(ins.slope.word(hd)?),
                longitude_class: l.to_vec(),
                longitude: names(lon.word(hd)?),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Attempt {
    /// (cusp representative, class) per cusp.
    pub slopes: Vec<(String, Vec<i64>)>,
    pub words: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    pub success: bool,
    pub reason: String,
    pub trace: Vec<Move>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchReport {
    pub schema: String,
    pub bound: i64,
    pub budget: usize,
    pub successes: Vec<Attempt>,
    pub failures: Vec<Attempt>,
}

/// Try every assignment of slopes up to `bound`, shortest total first.
pub fn search_fillings(hd: &HandleDecomposition, cusps: &[CuspSection], bound: i64, budget: usize) -> Result<SearchReport> {
    let per_cusp: Vec<Vec<RankedSlope>> = cusps.iter().map(|s| enumerate_slopes(hd, s, bound)).collect::<Result<_>>()?;
    let mut combos: Vec<Vec<usize>> = vec![vec![]];
    for list in &per_cusp {
        combos = combos.into_iter().flat_map(|c| (0..list.len()).map(move |i| [c.clone(), vec![i]].concat())).collect();
    }
    if per_cusp.is_empty() || per_cusp.iter().any(|l| l.is_empty()) {
        combos.clear();
    }
    let geometric = per_cusp.iter().flatten().all(|r| r.length.is_some());
    let total = |c: &Vec<usize>| -> f64 {
        c.iter()
            .enumerate()
            .map(|(k, &i)| {
                let r = &per_cusp[k][i];
                if geometric { r.length.unwrap() } else { (r.slope.class[0].abs() + r.slope.class[1].abs()) as f64 }
            })
            .sum()
    };
    combos.sort_by(|a, b| total(a).partial_cmp(&total(b)).unwrap().then_with(|| a.cmp(b)));
    let attempts: Vec<Attempt> = combos
        .par_iter()
        .map(|c| {
            let ins: Vec<FillingInstruction> =
                c.iter().enumerate().map(|(k, &i)| FillingInstruction { cusp: k, slope: per_cusp[k][i].slope.clone() }).collect();
            attempt(hd, cusps, &ins, budget, geometric.then(|| total(c)))
        })
        .collect::<Result<_>>()?;
    let (successes, failures) = attempts.into_iter().partition(|a| a.success);
    Ok(SearchReport { schema: "handleforge-search/1".into(), bound, budget, successes, failures })
}

fn attempt(hd: &HandleDecomposition, cusps: &[CuspSection], ins: &[FillingInstruction], budget: usize, length: Option<f64>) -> Result<Attempt> {
    let slopes = ins.iter().map(|i| (cusps[i.cusp].representative.clone(), i.slope.class.clone())).collect();
    let words = ins
        .iter()
        .map(|i| Ok(i.slope.word(hd)?.iter().map(|&l| letter_name(&hd.generators, l)).collect()))
        .collect::<Result<_>>()?;
    let filled = fill(hd, cusps, ins)?;
    let pr = presentation(&filled)?;
    let (betti, torsion) = pr.abelianization();
    if betti != 0 || !torsion.is_empty() {
        let reason = format!("abelianization nontrivial: {}", describe_group(betti, &torsion));
        return Ok(Attempt { slopes, words, length, success: false, reason, trace: vec![] });
    }
    let rep = certify_sphere(&filled, budget)?;
    let reason = if rep.trivialized {
        "trivialized".to_string()
    } else if rep.budget_exhausted {
        "budget exhausted".to_string()
    } else {
        format!("presentation stuck with {} generators", rep.remaining.generators.len())
    };
    Ok(Attempt { slopes, words, length, success: rep.trivialized, reason, trace: rep.trace })
}

pub fn describe_group(betti: usize, torsion: &[i64]) -> String {
    let mut parts: Vec<String> = Vec::new();
    match betti {
        0 => {}
        1 => parts.push("Z".into()),
        b => parts.push(format!("Z^{b}")),
    }
    parts.extend(torsion.iter().map(|t| format!("Z/{t}")));
    if parts.is_empty() { "0".into() } else { parts.join(" + ") }
}
