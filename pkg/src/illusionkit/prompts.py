"""Prompt templates for the recognition task and for the judge model."""
from __future__ import annotations

from .errors import UnknownKind

PLACEHOLDER = "[hidden_type]"

VANILLA = "There is a [hidden_type] in the image, what is it ?"

COT = (
    "You are an expert in solving visual puzzles and optical illusions. "
    "Your task is to identify the hidden [hidden_type] embedded in the image.\n"
    "\n"
    "The image is designed as an optical illusion, where the character is subtly "
    "integrated into the semantic background or noise patterns.\n"
    "To identify the hidden content, you can simulate human visual behaviors:\n"
    "1. Imagine squinting your eyes or slightly blurring your vision. Ignore the sharp, "
    "high frequency details, textures and noise in the image.\n"
    "2. Imagine viewing the image from a long distance. You can resize the image smaller "
    "in your mind to get a global view of the image.\n"
    "You can combine the two strategies to enhance your perception of the hidden character.\n"
    "\n"
    "Now, please analyze the image carefully, and identify the hidden [hidden_type]."
)

SMSP = (
    "I provide four views of the SAME image, the original view and the global views. "
    "There is a SAME [hidden_type] embedded in these images, with the help of the views, "
    "what is it ?"
)

TEMPLATES = {"vanilla": VANILLA, "cot": COT, "smsp": SMSP}

JUDGE = """You are a strict evaluator. Your task is to determine whether the model's response correctly identifies the hidden number(s), letter(s), word(s), or Chinese character(s) in the image.

You will be given a ground truth answer, which is the correct hidden content, and a model response, which is the content identified by a specific model. You should compare the model response with the ground truth answer and decide if the model's identification is correct.
- [Correct]: If the model response exactly matches the ground truth answer.
- [Incorrect]: If the model response does not match the ground truth answer.
Your output should only contain your evaluation result, either "Correct" or "Incorrect".

# Example 1
Ground Truth Answer: 5
Model Response: Looking at the image carefully, I can identify the hidden number: 5.
Evaluation: Correct
# Example 2
Ground Truth Answer: animal
Model Response: The hidden word in the image is "ANIMAL".
Evaluation: Correct
# Example 3
Ground Truth Answer: A
Model Response: The hidden letter in the image is B.
Evaluation: Incorrect
# Example 4
Ground Truth Answer: 我
Model Response: The hidden Chinese character in the image is 我.
Evaluation: Correct
# Example 5
Ground Truth Answer: 你好吗
Model Response: The hidden Chinese characters in the image are 我好嘛.
Evaluation: Incorrect

Now it's your turn to evaluate.

Ground Truth Answer: [GROUND_TRUTH]
Model Response: [RESPONSE]
Evaluation:"""

# How each hidden type is named inside a prompt.
HIDDEN_TYPE_NAMES = {
    "digit": "number",
    "letter": "letter",
    "chinese": "Chinese character",
    "word": "word",
    "pattern": "pattern",
}

_COUNT_WORDS = {2: "two", 3: "three", 4: "four", 5: "five", 6: "six", 7: "seven", 8: "eight"}


def render_prompt(kind: str, hidden_type: str, n_views: int = 4) -> str:
    """Fill a template. ``hidden_type`` may be a manifest type or free text.

    ``n_views`` only affects the multi-view template; the default of four
    matches K = 3 variants plus the original.
    """
    if kind not in TEMPLATES:
        raise UnknownKind(f"unknown prompt kind {kind!r}; expected one of {sorted(TEMPLATES)}")
    if not hidden_type:
        raise ValueError("hidden_type must be non-empty")
    body = TEMPLATES[kind]
    if kind == "smsp" and n_views != 4:
        body = body.replace("four views", f"{_COUNT_WORDS.get(n_views, str(n_views))} views", 1)
    return body.replace(PLACEHOLDER, HIDDEN_TYPE_NAMES.get(hidden_type, hidden_type))


def render_judge_prompt(truth: str, response: str) -> str:
    return JUDGE.replace("[GROUND_TRUTH]", truth).replace("[RESPONSE]", response)
