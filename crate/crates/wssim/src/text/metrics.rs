use crate::scalar::Scalar;

/// Longest shared prefix considered by the Winkler boost.
const WINKLER_PREFIX_CAP: usize = 4;

/// Default scaling factor for the Winkler prefix boost.
const WINKLER_PREFIX_SCALE: f64 = 0.1;

/// Jaro similarity between two strings, computed over Unicode scalar values.
///
/// Characters match when they are equal and no further apart than
/// `floor(max_len / 2) - 1` positions. Transpositions count the matched
/// characters that appear in different relative order, halved. Two empty
/// strings score 1, one empty string scores 0.
pub fn jaro<F: Scalar>(a: &str, b: &str) -> F {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() && b.is_empty() {
        return F::one();
    }
    if a.is_empty() || b.is_empty() {
        return F::zero();
    }
    if a == b {
        return F::one();
    }

    let window = (a.len().max(b.len()) / 2).saturating_sub(1);
    let mut a_matched = vec![false; a.len()];
    let mut b_matched = vec![false; b.len()];
    let mut matches = 0usize;
    for (i, &ca) in a.iter().enumerate() {
        let lo = i.saturating_sub(window);
        let hi = (i + window + 1).min(b.len());
        for j in lo..hi {
            if !b_matched[j] && ca == b[j] {
                a_matched[i] = true;
                b_matched[j] = true;
                matches += 1;
                break;
            }
        }
    }
    if matches == 0 {
        return F::zero();
    }

    let mut mismatched = 0usize;
    let mut j = 0usize;
    for (i, &ca) in a.iter().enumerate() {
        if !a_matched[i] {
            continue;
        }
        while !b_matched[j] {
            j += 1;
        }
        if ca != b[j] {
            mismatched += 1;
        }
        j += 1;
    }

    let m = F::from_usize(matches).expect("match count");
    let t = F::from_usize(mismatched).expect("transposition count") / F::from_ratio(2, 1);
    let three = F::from_ratio(3, 1);
    (m / F::from_usize(a.len()).expect("len")
        + m / F::from_usize(b.len()).expect("len")
        + (m - t) / m)
        / three
}

/// Jaro-Winkler similarity: Jaro plus an unconditional boost proportional to
/// the length of the shared prefix (at most four characters).
pub fn jaro_winkler<F: Scalar>(a: &str, b: &str) -> F {
    jaro_winkler_with(a, b, F::from_config(WINKLER_PREFIX_SCALE))
}

/// Jaro-Winkler with an explicit prefix scaling factor.
///
/// The result is clamped to 1 so that scales above `1 / prefix_cap` cannot
/// push the score out of range.
pub fn jaro_winkler_with<F: Scalar>(a: &str, b: &str, prefix_scale: F) -> F {
    let j: F = jaro(a, b);
    let prefix = a
        .chars()
        .zip(b.chars())
        .take(WINKLER_PREFIX_CAP)
        .take_while(|(ca, cb)| ca == cb)
        .count();
    let boost = F::from_usize(prefix).expect("prefix length") * prefix_scale * (F::one() - j);
    (j + boost).min(F::one())
}
