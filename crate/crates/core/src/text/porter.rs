//! Porter (1980) suffix-stripping stemmer, original rule set.
//!
//! Works on Unicode scalars; anything outside `a e i o u` (and `y` after a
//! consonant) counts as a consonant, so non-English tokens pass through
//! mostly untouched.

const STEP2: &[(&str, &str)] = &[
    ("ational", "ate"),
    ("tional", "tion"),
    ("enci", "ence"),
    ("anci", "ance"),
    ("izer", "ize"),
    ("abli", "able"),
    ("alli", "al"),
    ("entli", "ent"),
    ("eli", "e"),
    ("ousli", "ous"),
    ("ization", "ize"),
    ("ation", "ate"),
    ("ator", "ate"),
    ("alism", "al"),
    ("iveness", "ive"),
    ("fulness", "ful"),
    ("ousness", "ous"),
    ("aliti", "al"),
    ("iviti", "ive"),
    ("biliti", "ble"),
];

const STEP3: &[(&str, &str)] = &[
    ("icate", "ic"),
    ("ative", ""),
    ("alize", "al"),
    ("iciti", "ic"),
    ("ical", "ic"),
    ("ful", ""),
    ("ness", ""),
];

const STEP4: &[&str] = &[
    "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement", "ment", "ent", "ion", "ou",
    "ism", "ate", "iti", "ous", "ive", "ize",
];

fn is_consonant(w: &[char], i: usize) -> bool {
    match w[i] {
        'a' | 'e' | 'i' | 'o' | 'u' => false,
        'y' => i == 0 || !is_consonant(w, i - 1),
        _ => true,
    }
}

/// Number of vowel-consonant sequences, the `m` in `[C](VC)^m[V]`.
fn measure(w: &[char]) -> usize {
    let mut m = 0;
    let mut prev_vowel = false;
    for i in 0..w.len() {
        let consonant = is_consonant(w, i);
        if consonant && prev_vowel {
            m += 1;
        }
        prev_vowel = !consonant;
    }
    m
}

fn has_vowel(w: &[char]) -> bool {
    (0..w.len()).any(|i| !is_consonant(w, i))
}

fn ends_double_consonant(w: &[char]) -> bool {
    let n = w.len();
    n >= 2 && w[n - 1] == w[n - 2] && is_consonant(w, n - 1)
}

/// consonant-vowel-consonant ending where the final consonant is not w, x, or y.
fn ends_cvc(w: &[char]) -> bool {
    let n = w.len();
    n >= 3
        && is_consonant(w, n - 3)
        && !is_consonant(w, n - 2)
        && is_consonant(w, n - 1)
        && !matches!(w[n - 1], 'w' | 'x' | 'y')
}

fn ends_with(w: &[char], suffix: &str) -> bool {
    let n = suffix.chars().count();
    w.len() >= n && w[w.len() - n..].iter().copied().eq(suffix.chars())
}

fn stem_len(w: &[char], suffix: &str) -> usize {
    w.len() - suffix.chars().count()
}

fn replace(w: &mut Vec<char>, suffix: &str, replacement: &str) {
    let keep = stem_len(w, suffix);
    w.truncate(keep);
    w.extend(replacement.chars());
}

/// Applies the rule with the longest matching suffix, if its stem satisfies
/// `cond`. Shorter suffixes are not retried when the condition fails.
fn apply_longest(w: &mut Vec<char>, rules: &[(&str, &str)], cond: impl Fn(&[char], &str) -> bool) {
    let best = rules
        .iter()
        .filter(|(suffix, _)| ends_with(w, suffix))
        .max_by_key(|(suffix, _)| suffix.len());
    if let Some(&(suffix, replacement)) = best {
        if cond(&w[..stem_len(w, suffix)], suffix) {
            replace(w, suffix, replacement);
        }
    }
}

fn step1a(w: &mut Vec<char>) {
    if ends_with(w, "sses") {
        replace(w, "sses", "ss");
    } else if ends_with(w, "ies") {
        replace(w, "ies", "i");
    } else if ends_with(w, "ss") {
    } else if ends_with(w, "s") {
        w.pop();
    }
}

fn step1b(w: &mut Vec<char>) {
    if ends_with(w, "eed") {
        if measure(&w[..stem_len(w, "eed")]) > 0 {
            w.pop();
        }
        return;
    }
    let stripped = ["ed", "ing"]
        .into_iter()
        .find(|s| ends_with(w, s) && has_vowel(&w[..stem_len(w, s)]));
    let Some(suffix) = stripped else {
        return;
    };
    w.truncate(stem_len(w, suffix));
    if ends_with(w, "at") || ends_with(w, "bl") || ends_with(w, "iz") {
        w.push('e');
    } else if ends_double_consonant(w) && !matches!(w[w.len() - 1], 'l' | 's' | 'z') {
        w.pop();
    } else if measure(w) == 1 && ends_cvc(w) {
        w.push('e');
    }
}

fn step1c(w: &mut [char]) {
    let n = w.len();
    if ends_with(w, "y") && has_vowel(&w[..n - 1]) {
        w[n - 1] = 'i';
    }
}

fn step4(w: &mut Vec<char>) {
    let best = STEP4
        .iter()
        .filter(|suffix| ends_with(w, suffix))
        .max_by_key(|suffix| suffix.len());
    if let Some(suffix) = best {
        let stem = &w[..stem_len(w, suffix)];
        let ok = measure(stem) > 1 && (*suffix != "ion" || matches!(stem.last(), Some('s' | 't')));
        if ok {
            w.truncate(stem.len());
        }
    }
}

fn step5(w: &mut Vec<char>) {
    if ends_with(w, "e") {
        let stem = &w[..w.len() - 1];
        let m = measure(stem);
        if m > 1 || (m == 1 && !ends_cvc(stem)) {
            w.pop();
        }
    }
    if measure(w) > 1 && ends_double_consonant(w) && ends_with(w, "l") {
        w.pop();
    }
}

/// One pass of the Porter algorithm. Tokens of one or two characters are
/// returned unchanged.
pub fn porter_stem(token: &str) -> String {
    let mut w: Vec<char> = token.chars().collect();
    if w.len() <= 2 {
        return token.to_string();
    }
    step1a(&mut w);
    step1b(&mut w);
    step1c(&mut w);
    apply_longest(&mut w, STEP2, |stem, _| measure(stem) > 0);
    apply_longest(&mut w, STEP3, |stem, _| measure(stem) > 0);
    step4(&mut w);
    step5(&mut w);
    w.into_iter().collect()
}

/// Porter stem iterated to a fixed point, so that `stem(stem(t)) == stem(t)`.
///
/// A single Porter pass is not idempotent (`agreed -> agre -> agr`); the
/// iteration converges in a few passes because no pass lengthens a word.
pub fn stem(token: &str) -> String {
    let mut current = porter_stem(token);
    for _ in 0..16 {
        let next = porter_stem(&current);
        if next == current {
            break;
        }
        current = next;
    }
    current
}
