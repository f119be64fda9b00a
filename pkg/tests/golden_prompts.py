"""Golden prompt text the engine must reproduce byte for byte.

These strings are transcribed independently of the package source; the
tests compare rendered prompts against them, so a regression in either
template shows up as a byte-level diff.
"""

ONE_SET_GOLDEN = (
    "Here is a text from a medical transcript obtained from an ASR. It "
    "might contain some error, for example, wrong medical term transcribed. "
    "Can you help me correct it by replacing the words that you think are "
    "most likely the wrong ones, with words that you think are most "
    "possibly the right word in this context? You can also add words or "
    "delete words. The words are mostly in the field of cardiology, so "
    "please try to relate to cardiological terms. If you think it is "
    "correct already, leave it without any change. Here is the text: "
)

SENTENCE_GOLDEN = (
    "Here is a sentence from a medical transcript obtained from an ASR. It "
    "might contain some error, for example, wrong medical term transcribed. "
    "Can you help me correct it by replacing the words that you think are "
    "most likely the wrong ones, with words that you think are most "
    "possibly the right word in this context? You can also add words or "
    "delete words. The words are mostly in the field of cardiology, so "
    "please try to relate to cardiological terms. If you think it is "
    "correct already, leave it without any change. Here is the sentence: "
)

PINK_BOX_SENTENCE = (
    "Xeralta has been resumed and patient is back on amino 2 and will be "
    "on POO daily"
)

PINK_BOX_RESPONSE = (
    '"Xarelto has been resumed, and the patient is back on amiodarone and '
    'will be on PO (per os) daily."\n'
    "\n"
    "Explanation:\n"
    "\n"
    "1. Xeralta should be Xarelto, which is a commonly prescribed "
    "anticoagulant.\n"
    "2. amino 2 seems to be a mistranscription of amiodarone, an "
    "antiarrhythmic medication.\n"
    '3. POO should be corrected to PO, which stands for "per os," meaning '
    '"by mouth" in medical terminology.\n'
)

PINK_BOX_CORRECTED = (
    "Xarelto has been resumed, and the patient is back on amiodarone and "
    "will be on PO (per os) daily."
)

PINK_BOX_RATIONALE = (
    "Xeralta should be Xarelto, which is a commonly prescribed anticoagulant.",
    "amino 2 seems to be a mistranscription of amiodarone, an antiarrhythmic "
    "medication.",
    'POO should be corrected to PO, which stands for "per os," meaning '
    '"by mouth" in medical terminology.',
)

GREEN_BOX_SENTENCE = "Pacemaker site, no bleeding or hematoma."
GREEN_BOX_RESPONSE = "Pacemaker site, no bleeding or ecchymosis.\n"
GREEN_BOX_CORRECTED = "Pacemaker site, no bleeding or ecchymosis."
