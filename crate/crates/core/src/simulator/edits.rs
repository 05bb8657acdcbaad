use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{new_paragraph, SimDocument, TextPool};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EditUnit {
    Word,
    Sentence,
    Paragraph,
    SectionName,
    Title,
}

impl EditUnit {
    pub const ALL: [EditUnit; 5] =
        [EditUnit::Word, EditUnit::Sentence, EditUnit::Paragraph, EditUnit::SectionName, EditUnit::Title];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EditAction {
    Delete,
    Add,
    Replace,
}

impl EditAction {
    pub const ALL: [EditAction; 3] = [EditAction::Delete, EditAction::Add, EditAction::Replace];
}

/// An applied edit. `requested` differs from `action` when a deletion would
/// have removed the last remaining unit and was turned into a replacement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditOp {
    pub unit: EditUnit,
    pub requested: EditAction,
    pub action: EditAction,
}

/// Relative frequency of each action on one unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActionWeights {
    pub delete: f64,
    pub add: f64,
    pub replace: f64,
}

impl ActionWeights {
    pub const fn uniform(w: f64) -> Self {
        ActionWeights { delete: w, add: w, replace: w }
    }

    pub const ZERO: ActionWeights = ActionWeights::uniform(0.0);
}

/// Relative frequency of every `(unit, action)` edit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpWeights {
    pub word: ActionWeights,
    pub sentence: ActionWeights,
    pub paragraph: ActionWeights,
    pub section_name: ActionWeights,
    pub title: ActionWeights,
}

impl Default for OpWeights {
    fn default() -> Self {
        OpWeights {
            word: ActionWeights::uniform(3.0),
            sentence: ActionWeights::uniform(2.0),
            paragraph: ActionWeights::uniform(1.0),
            section_name: ActionWeights::uniform(1.0),
            title: ActionWeights::uniform(1.0),
        }
    }
}

impl OpWeights {
    /// All weight on a single edit.
    pub fn only(unit: EditUnit, action: EditAction) -> Self {
        let mut w = OpWeights {
            word: ActionWeights::ZERO,
            sentence: ActionWeights::ZERO,
            paragraph: ActionWeights::ZERO,
            section_name: ActionWeights::ZERO,
            title: ActionWeights::ZERO,
        };
        let slot = match unit {
            EditUnit::Word => &mut w.word,
            EditUnit::Sentence => &mut w.sentence,
            EditUnit::Paragraph => &mut w.paragraph,
            EditUnit::SectionName => &mut w.section_name,
            EditUnit::Title => &mut w.title,
        };
        match action {
            EditAction::Delete => slot.delete = 1.0,
            EditAction::Add => slot.add = 1.0,
            EditAction::Replace => slot.replace = 1.0,
        }
        w
    }

    /// Weights in `EditUnit::ALL` x `EditAction::ALL` order.
    fn flat(&self) -> [f64; 15] {
        let mut out = [0.0; 15];
        let units = [&self.word, &self.sentence, &self.paragraph, &self.section_name, &self.title];
        for (u, a) in units.iter().enumerate() {
            out[u * 3..u * 3 + 3].copy_from_slice(&[a.delete, a.add, a.replace]);
        }
        out
    }

    pub fn validate(&self) -> Result<(), String> {
        let w = self.flat();
        if w.iter().any(|x| !x.is_finite() || *x < 0.0) || w.iter().sum::<f64>() <= 0.0 {
            return Err("edit weights must be non-negative with a positive sum".into());
        }
        Ok(())
    }
}

pub const MIN_EDITS: usize = 1;
pub const MAX_EDITS: usize = 10;

/// Applies 1-10 random edits to a copy of `doc`.
pub fn revise_document<R: Rng + ?Sized>(
    rng: &mut R,
    pool: &TextPool,
    doc: &SimDocument,
    weights: &OpWeights,
) -> (SimDocument, Vec<EditOp>) {
    let ops = WeightedIndex::new(weights.flat()).expect("validated weights");
    let mut out = doc.clone();
    let n = rng.random_range(MIN_EDITS..=MAX_EDITS);
    let log = (0..n)
        .map(|_| {
            let k = ops.sample(rng);
            let (unit, requested) = (EditUnit::ALL[k / 3], EditAction::ALL[k % 3]);
            let action = apply(rng, pool, &mut out, unit, requested);
            EditOp { unit, requested, action }
        })
        .collect();
    (out, log)
}

/// Positions of every paragraph as `(section, paragraph)`.
fn paragraph_slots(doc: &SimDocument) -> Vec<(usize, usize)> {
    doc.sections.iter().enumerate().flat_map(|(s, sec)| (0..sec.paragraphs.len()).map(move |p| (s, p))).collect()
}

/// Redraws a few times so a replacement changes something; a pool with a
/// single option can still return the old value.
fn differing<T: PartialEq>(old: &T, mut draw: impl FnMut() -> T) -> T {
    let mut v = draw();
    for _ in 0..16 {
        if &v != old {
            break;
        }
        v = draw();
    }
    v
}

fn pick<R: Rng + ?Sized, T: Copy>(rng: &mut R, items: &[T]) -> T {
    items[rng.random_range(0..items.len())]
}

fn apply<R: Rng + ?Sized>(
    rng: &mut R,
    pool: &TextPool,
    doc: &mut SimDocument,
    unit: EditUnit,
    action: EditAction,
) -> EditAction {
    match unit {
        EditUnit::Title => match action {
            EditAction::Delete if !doc.title.is_empty() => {
                doc.title.clear();
                EditAction::Delete
            }
            EditAction::Add => {
                let extra = pool.phrase(rng, 1, 2);
                doc.title.extend(extra);
                EditAction::Add
            }
            _ => {
                doc.title = differing(&doc.title, || pool.phrase(rng, 1, 4));
                EditAction::Replace
            }
        },
        EditUnit::SectionName => {
            let s = rng.random_range(0..doc.sections.len());
            match action {
                EditAction::Delete if s > 0 => {
                    // The heading disappears; its paragraphs join the previous section.
                    let moved = doc.sections.remove(s).paragraphs;
                    doc.sections[s - 1].paragraphs.extend(moved);
                    EditAction::Delete
                }
                EditAction::Add => {
                    let sec = &mut doc.sections[s];
                    let name = pool.phrase(rng, 1, 3);
                    if sec.paragraphs.len() >= 2 {
                        let at = rng.random_range(1..sec.paragraphs.len());
                        let tail = sec.paragraphs.split_off(at);
                        doc.sections.insert(s + 1, super::Section { name, paragraphs: tail });
                    } else {
                        let para = new_paragraph(rng, pool);
                        doc.sections.insert(s + 1, super::Section { name, paragraphs: vec![para] });
                    }
                    EditAction::Add
                }
                _ => {
                    let name = &mut doc.sections[s].name;
                    *name = differing(name, || pool.phrase(rng, 1, 3));
                    EditAction::Replace
                }
            }
        }
        EditUnit::Paragraph => {
            let slots = paragraph_slots(doc);
            if slots.is_empty() {
                let para = new_paragraph(rng, pool);
                let s = rng.random_range(0..doc.sections.len());
                doc.sections[s].paragraphs.push(para);
                return EditAction::Add;
            }
            let (s, p) = pick(rng, &slots);
            match action {
                EditAction::Delete if slots.len() > 1 => {
                    doc.sections[s].paragraphs.remove(p);
                    EditAction::Delete
                }
                EditAction::Add => {
                    let para = new_paragraph(rng, pool);
                    let at = rng.random_range(0..=doc.sections[s].paragraphs.len());
                    doc.sections[s].paragraphs.insert(at, para);
                    EditAction::Add
                }
                _ => {
                    let para = &mut doc.sections[s].paragraphs[p];
                    *para = differing(para, || new_paragraph(rng, pool));
                    EditAction::Replace
                }
            }
        }
        EditUnit::Sentence => {
            let slots = paragraph_slots(doc);
            if slots.is_empty() {
                return apply(rng, pool, doc, EditUnit::Paragraph, EditAction::Add);
            }
            let (s, p) = pick(rng, &slots);
            let para = &mut doc.sections[s].paragraphs[p];
            let k = rng.random_range(0..para.len());
            match action {
                EditAction::Delete if para.len() > 1 => {
                    para.remove(k);
                    EditAction::Delete
                }
                EditAction::Add => {
                    let at = rng.random_range(0..=para.len());
                    para.insert(at, pool.sentence(rng));
                    EditAction::Add
                }
                _ => {
                    para[k] = differing(&para[k], || pool.sentence(rng));
                    EditAction::Replace
                }
            }
        }
        EditUnit::Word => {
            let slots = paragraph_slots(doc);
            if slots.is_empty() {
                return apply(rng, pool, doc, EditUnit::Paragraph, EditAction::Add);
            }
            let (s, p) = pick(rng, &slots);
            let para = &mut doc.sections[s].paragraphs[p];
            let k = rng.random_range(0..para.len());
            let sentence = &mut para[k];
            let w = rng.random_range(0..sentence.len());
            match action {
                EditAction::Delete if sentence.len() > 1 => {
                    sentence.remove(w);
                    EditAction::Delete
                }
                EditAction::Add => {
                    let at = rng.random_range(0..=sentence.len());
                    sentence.insert(at, pool.word(rng));
                    EditAction::Add
                }
                _ => {
                    sentence[w] = differing(&sentence[w], || pool.word(rng));
                    EditAction::Replace
                }
            }
        }
    }
}
