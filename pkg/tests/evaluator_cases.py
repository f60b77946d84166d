"""Decision-table fixture for the hybrid evaluator and a rule-following mock judge."""
import re

# (truth, response, expected verdict, whether the judge stage is reached)
CASES = [
    # worked examples from the judge prompt
    ("5", "Looking at the image carefully, I can identify the hidden number: 5.", "Correct", True),
    ("animal", 'The hidden word in the image is "ANIMAL".', "Correct", False),
    ("A", "The hidden letter in the image is B.", "Incorrect", True),
    ("我", "The hidden Chinese character in the image is 我.", "Correct", True),
    ("你好吗", "The hidden Chinese characters in the image are 我好嘛.", "Incorrect", False),
    # truth absent from the response
    ("hello", "I can see the word help in the picture.", "Incorrect", False),
    ("7", "", "Incorrect", False),
    # long truth contained, not a common string
    ("banana", "It clearly reads Banana.", "Correct", False),
    ("你好吗", "图中隐藏的汉字是你好吗", "Correct", False),
    # short or common truths defer to the judge
    ("12", "The number is 123.", "Incorrect", True),
    ("42", "I think it is 42.", "Correct", True),
    ("the", "The hidden word is THE.", "Correct", True),
]

_GT = re.compile(r"Ground Truth Answer: (.*)\nModel Response: (.*)\nEvaluation:\s*$")


def mock_judge(prompt: str) -> str:
    """Answers Correct when the truth appears in the response as a whole token."""
    truth, response = _GT.search(prompt).groups()
    pat = r"(?<!\w)" + re.escape(truth.casefold()) + r"(?!\w)"
    return "Correct" if re.search(pat, response.casefold()) else "Incorrect"
