"""Values computed offline by independent tools and frozen here."""

# (candidate, reference, score) where score is nltk 3.10.3
# nltk.translate.meteor_score.meteor_score([ref_tokens], cand_tokens) with an
# identity stemmer and a wordnet stub without synsets (exact matching only).
# No pair repeats a token on either side, where nltk's greedy exact stage
# and an optimal alignment coincide.
METEOR_CASES = [
    ("The patient was admitted for pneumonia", "Patient admitted with community acquired pneumonia", 0.25),
    ("potassium 4.1 mmol/L", "Most recent potassium was 4.1", 0.43314500941619577),
    ("metoprolol 25 mg twice daily", "Discharged on metoprolol 25 mg twice daily", 0.7323529411764707),
    ("no acute cardiopulmonary process", "Impression: no acute cardiopulmonary process identified", 0.6842672413793103),
    ("penicillin allergy with rash", "Allergic to penicillin", 0.16129032258064518),
    ("heart failure exacerbation", "Admitted for acute decompensated heart failure", 0.3289473684210526),
    ("left lower lobe consolidation seen", "consolidation in the left lower lobe", 0.635593220338983),
    ("sepsis due to urinary tract infection", "urosepsis from E. coli infection", 0.09803921568627452),
    ("atrial fibrillation with rapid ventricular response", "new onset atrial fibrillation rapid response",
     0.5260416666666666),
    ("creatinine improved to baseline", "renal function returned to baseline after fluids", 0.2798507462686567),
]
