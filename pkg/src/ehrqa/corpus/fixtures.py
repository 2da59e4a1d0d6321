"""Synthetic, schema-conformant EHR corpora for tests and demos.

Records are entirely invented; no real patient data is involved.
"""

from __future__ import annotations

import random
from datetime import datetime, timedelta, timezone

from .types import ClinicalNote, NoteType, Option, QAItem, Task

DIAGNOSES = [
    "community acquired pneumonia", "acute pancreatitis", "congestive heart failure exacerbation",
    "diabetic ketoacidosis", "upper gastrointestinal bleeding", "cellulitis of the left leg",
    "acute kidney injury", "atrial fibrillation with rapid ventricular response",
    "chronic obstructive pulmonary disease exacerbation", "urinary tract infection with sepsis",
    "small bowel obstruction", "pulmonary embolism",
]
MEDICATIONS = [
    "metoprolol", "furosemide", "lisinopril", "apixaban", "insulin glargine", "ceftriaxone",
    "vancomycin", "pantoprazole", "atorvastatin", "prednisone", "levofloxacin", "heparin",
    "amlodipine", "warfarin", "albuterol", "spironolactone",
]
ALLERGIES = ["penicillin", "sulfa drugs", "codeine", "latex", "iodinated contrast", "aspirin"]
FINDINGS = [
    "a right lower lobe consolidation", "a small left pleural effusion", "no acute cardiopulmonary process",
    "mild cardiomegaly", "a 6 mm nodule in the right upper lobe", "diffuse interstitial edema",
    "a left basilar atelectasis",
]
FILLER = [
    "Patient seen and examined at bedside this morning.",
    "Vital signs reviewed and stable overnight without acute events.",
    "Nursing reports adequate oral intake and ambulation with assistance.",
    "Lungs with scattered crackles at the bases, no wheezing appreciated.",
    "Abdomen soft, nontender, nondistended, with normal bowel sounds.",
    "Extremities warm and well perfused with trace bilateral edema.",
    "Neurologically intact, alert and oriented to person, place and time.",
    "Plan discussed with the patient and family who agree with management.",
    "Continue current regimen and reassess in the morning.",
    "Electrolytes repleted per protocol and will be rechecked.",
    "Physical therapy consulted for mobility evaluation prior to discharge.",
    "Blood cultures remain without growth to date.",
    "Code status confirmed as full code.",
    "Pain controlled with scheduled acetaminophen.",
    "Tolerating diet without nausea or vomiting.",
    "Telemetry without significant arrhythmia over the past day.",
    "Urine output adequate, creatinine trending down.",
    "Skin intact without pressure injury.",
    "Social work following for discharge planning and home services.",
    "Will follow up outstanding studies and adjust therapy accordingly.",
]


def _filler(rng, n_words):
    out, count = [], 0
    while count < n_words:
        s = rng.choice(FILLER)
        out.append(s)
        count += len(s.split())
    return " ".join(out)


def _vitals(rng):
    return (
        f"Temperature {rng.uniform(36.2, 39.4):.1f} C, heart rate {rng.randint(58, 128)}, "
        f"blood pressure {rng.randint(92, 168)}/{rng.randint(50, 96)}, oxygen saturation {rng.randint(88, 100)}%."
    )


def generate_fixture(n_patients=12, items_per_patient=5, seed=0, min_notes=3, max_notes=40,
                     words_per_note=(120, 380)):
    """Return ``(notes, items)`` for a reproducible synthetic corpus."""
    rng = random.Random(seed)
    notes, items = [], []
    base = datetime(2113, 1, 1, tzinfo=timezone.utc)
    for p in range(n_patients):
        pid = f"P{p:04d}"
        # spread patients across context-length regimes
        n_notes = min_notes + (p * (max_notes - min_notes)) // max(1, n_patients - 1)
        n_notes = max(min_notes, min(max_notes, n_notes + rng.randint(-1, 1)))
        diagnosis = rng.choice(DIAGNOSES)
        meds = rng.sample(MEDICATIONS, 5)
        discharge_med = meds[0]
        allergy = rng.choice(ALLERGIES)
        finding = rng.choice(FINDINGS)
        admit = base + timedelta(days=rng.randint(0, 3000), hours=rng.randint(0, 23))
        stay_id = f"S{p:04d}01"

        patient_notes = []
        potassium_notes = []
        t = admit
        ds_index = n_notes - 1
        rad_index = 1 if n_notes > 2 else 0
        for j in range(n_notes):
            t = t + timedelta(hours=rng.randint(4, 30), minutes=rng.randint(0, 59))
            nid = f"{pid}-N{j:03d}"
            body = _filler(rng, rng.randint(*words_per_note))
            if j == ds_index:
                ntype = NoteType.DISCHARGE_SUMMARY
                text = (
                    f"DISCHARGE SUMMARY. Admission diagnosis: {diagnosis}. "
                    f"Allergies: {allergy}. Hospital course: {body} "
                    f"The patient was admitted for {diagnosis} and improved with treatment. "
                    f"Discharge medications: {discharge_med} daily. Follow up with primary care in one week."
                )
            elif j == rad_index:
                ntype = NoteType.RADIOLOGY_REPORT
                text = (
                    f"CHEST RADIOGRAPH. Indication: evaluate for infiltrate. Findings: {body} "
                    f"Impression: {finding}."
                )
            else:
                ntype = NoteType.CLINICAL_NOTE if rng.random() < 0.9 else NoteType.OTHER
                k = round(rng.uniform(3.1, 5.6), 1)
                text = f"Progress note. {_vitals(rng)} Potassium {k} mmol/L. {body}"
                if ntype is NoteType.CLINICAL_NOTE:
                    potassium_notes.append((nid, k, t))
            note = ClinicalNote(nid, pid, ntype, t, text, stay_id=stay_id)
            patient_notes.append(note)
        notes.extend(patient_notes)

        ds = patient_notes[ds_index]
        rad = patient_notes[rad_index]
        day = ds.timestamp.strftime("%Y-%m-%d")
        templates = []
        templates.append(QAItem(
            f"{pid}-Q0", pid, "What was the admission diagnosis for this hospital stay?",
            Task.OPEN_ENDED, f"The patient was admitted for {diagnosis}.",
            relevant_note_ids=frozenset({ds.note_id}),
            related_note_types=frozenset({NoteType.DISCHARGE_SUMMARY}),
        ))
        labels = ["A", "B", "C", "D", "E"]
        rng.shuffle(meds)
        correct = labels[meds.index(discharge_med)]
        templates.append(QAItem(
            f"{pid}-Q1", pid, f"Which medication was the patient discharged on ({day})?",
            Task.MULTIPLE_CHOICE, discharge_med,
            options=tuple(Option(lab, m) for lab, m in zip(labels, meds)),
            correct_option=correct,
            relevant_note_ids=frozenset({ds.note_id}),
            related_note_types=frozenset({NoteType.DISCHARGE_SUMMARY}),
        ))
        templates.append(QAItem(
            f"{pid}-Q2", pid, "What was the impression of the chest radiograph?",
            Task.EXTRACTIVE, finding,
            relevant_note_ids=frozenset({rad.note_id}),
            related_note_types=frozenset({NoteType.RADIOLOGY_REPORT}),
        ))
        templates.append(QAItem(
            f"{pid}-Q3", pid, "What drug allergy is documented for the patient?",
            Task.EXTRACTIVE, allergy,
            relevant_note_ids=frozenset({ds.note_id}),
            related_note_types=frozenset({NoteType.DISCHARGE_SUMMARY}),
        ))
        if potassium_notes:
            nid, k, when = potassium_notes[-1]
            templates.append(QAItem(
                f"{pid}-Q4", pid,
                f"What potassium value was recorded in the progress note of {when.strftime('%Y-%m-%d %H:%M')}?",
                Task.EXTRACTIVE, f"{k} mmol/L",
                relevant_note_ids=frozenset({nid}),
                related_note_types=frozenset({NoteType.CLINICAL_NOTE}),
            ))
        items.extend(templates[:items_per_patient])
    return notes, items
