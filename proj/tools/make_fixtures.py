#!/usr/bin/env python3
"""Regenerates the static test fixtures under tests/fixtures/."""
import csv
import json
import pathlib

OUT = pathlib.Path(__file__).resolve().parent.parent / "tests" / "fixtures"

NARRATIVES = [
    ("n01", "The Salt Road", "drama", "human", [
        "Ilse Varga runs a struggling salt mill on the edge of a dry lake.",
        "A trader offers her a contract to supply the coastal towns.",
        "She mortgages the mill to buy new wagons.",
        "Her brother Tomas warns her that the road is controlled by smugglers.",
        "Ilse decides to lead the first convoy herself.",
        "Halfway to the coast the smugglers seize two wagons.",
        "Tomas is wounded while defending the remaining cargo.",
        "The trader cancels the contract when the shipment arrives short.",
        "Ilse sells her wagons to pay the mortgage.",
        "At the town council she exposes the smugglers' bribes.",
        "The council reopens the road under guard.",
        "Ilse and Tomas return to the mill with a new contract.",
    ]),
    ("n02", "Glass Harbor", "thriller", "human", [
        "Detective Rana Obi is assigned to a missing-person case in a fishing town.",
        "The missing man's boat is found drifting with its engine removed.",
        "Rana learns that the harbor master falsified the tide logs.",
        "She decides to stay in town after her leave is cancelled.",
        "A storm cuts the town off from the mainland.",
        "Rana discovers a hidden dock beneath the cannery.",
        "The harbor master's men trap her inside the flooded dock.",
        "Her partner is suspended for helping her.",
        "Rana escapes through a drainage tunnel.",
        "She confronts the harbor master during the storm.",
        "The missing man is found alive in the cannery freezer.",
        "Rana testifies before the regional board.",
        "The harbor is placed under federal control.",
    ]),
    ("n03", "The Last Orchard", "drama", "human", [
        "Farmer Abel Kruse owns the largest orchard in the valley.",
        "A blight spreads through the eastern trees.",
        "Abel refuses to burn the infected trees.",
        "The bank calls in his loan.",
        "His daughter Mira proposes grafting a resistant variety.",
        "Abel agrees to let her try on a single row.",
        "The grafts take root over the winter.",
        "A late frost kills most of the new growth.",
        "Abel loses half of the orchard at auction.",
        "Mira's surviving grafts bear fruit the next autumn.",
        "Neighbors buy cuttings to save their own trees.",
    ]),
    ("n04", "Copper Wings", "adventure", "human", [
        "Orphan Lio Fenn scrapes a living repairing kites in a mountain village.",
        "A traveling engineer notices his talent.",
        "She invites him to help build a glider for a race.",
        "Lio leaves the village against his guardian's wishes.",
        "The glider wins the qualifying round.",
        "Lio becomes famous across the province.",
        "He starts ignoring the engineer's safety checks.",
        "During the final race the glider's frame cracks.",
        "Lio crashes into the lake and loses the glider.",
        "The sponsors abandon the team.",
        "Lio returns to the village with nothing.",
    ]),
    ("n05", "A Quiet Coup", "political drama", "human", [
        "Senator Hale is the most powerful figure in the capital.",
        "A junior aide, Corin Bask, uncovers irregular budget transfers.",
        "Hale's allies start to distance themselves.",
        "Hale decides to blame the aide for the transfers.",
        "The press turns against Hale anyway.",
        "Hale briefly regains support by promising reforms.",
        "A leaked recording proves the reforms are a cover.",
        "Hale's party removes him from the committee.",
        "He is charged with fraud.",
        "The court sentences him to prison.",
    ]),
    ("n06", "Lanterns", "fantasy", "human", [
        "Servant girl Nessa tends the lanterns of a cruel household.",
        "A stranger gives her a lantern that shows hidden paths.",
        "She follows a path to the royal festival.",
        "The prince dances with her all night.",
        "At dawn the lantern burns out and she flees.",
        "Her mistress discovers the lantern and locks her in the cellar.",
        "The prince's guards search every house in the city.",
        "Nessa relights the lantern with her last candle.",
        "The light guides the guards to the cellar.",
        "She is freed and invited to the palace.",
        "Nessa becomes keeper of the royal lanterns.",
    ]),
    ("n07", "Northern Line", "drama", "human", [
        "Railway clerk Petra Lund lives a comfortable life in the city.",
        "A strike shuts down the northern line.",
        "Petra loses her position and her apartment.",
        "She joins the strikers and organizes a soup kitchen.",
        "The company agrees to negotiate.",
        "Petra is elected to the bargaining committee.",
        "The talks collapse when the company hires replacement workers.",
        "Petra is arrested at the picket line.",
        "Public pressure forces her release.",
        "The company signs a new contract.",
        "Petra returns to work as the union's representative.",
        "The northern line reopens.",
    ]),
    ("n08", "The Cartographer", "mystery", "human", [
        "Mapmaker Ezra Quill is hired to chart an abandoned estate.",
        "He finds rooms that are missing from every earlier map.",
        "A locked study contains letters about a buried fortune.",
        "Ezra decides to keep the discovery from his employer.",
        "He begins digging under the east wing at night.",
        "The employer catches him and seizes the letters.",
        "Ezra is dismissed and threatened with arrest.",
        "He reconstructs the hidden rooms from memory.",
        "His new map leads him to the real vault.",
        "The vault holds the estate's lost records rather than gold.",
        "Ezra donates the records to the town archive.",
    ]),
    ("n09", "Second Serve", "sports", "human", [
        "Tennis champion Ada Rhee is ranked first in the world.",
        "A wrist injury forces her to withdraw from the open.",
        "Her sponsors drop her within a month.",
        "Ada hires an unknown coach from her hometown.",
        "They rebuild her serve from the ground up.",
        "She wins a small regional tournament.",
        "Her old rival defeats her badly in the quarterfinals.",
        "Ada nearly quits the sport.",
        "Her coach convinces her to play one more season.",
        "She reaches the final of the open.",
        "Ada wins the title in five sets.",
    ]),
    ("n10", "Ironwood", "western", "human", [
        "Rancher Cole Maddox owns the richest land in Ironwood county.",
        "A drought dries up his wells.",
        "His cattle begin to die.",
        "Cole borrows money from a railroad agent.",
        "He digs a new well on the northern ridge.",
        "The well strikes water and the herd recovers.",
        "The agent demands the ridge as payment.",
        "Cole refuses and the agent burns his barn.",
        "The sheriff arrests the agent for arson.",
        "Cole rebuilds the barn with help from his neighbors.",
        "The ranch prospers again.",
    ]),
]

# narrative -> (arc per annotator, tps per annotator); majority arc is the first listed
ANNOTATIONS = {
    "n01": [("ManInHole", [2, 5, 6, 8, 9]), ("ManInHole", [2, 4, 6, 9, 9]), ("Cinderella", [3, 5, 7, 8, 8])],
    "n02": [("DoubleManInHole", [1, 4, 6, 8, 10]), ("DoubleManInHole", [2, 4, 5, 8, 10])],
    "n03": [("RichesToRags", [2, 5, 7, 7, 8]), ("RichesToRags", [2, 5, 6, 8, 8]), ("Oedipus", [2, 6, 7, 8, 7])],
    "n04": [("Icarus", [2, 3, 4, 7, 8]), ("Icarus", [2, 3, 4, 8, 8])],
    "n05": [("RichesToRags", [2, 4, 5, 6, 7]), ("Oedipus", [2, 4, 6, 7, 7]), ("RichesToRags", [2, 4, 5, 6, 7])],
    "n06": [("Cinderella", [2, 3, 5, 6, 8]), ("Cinderella", [2, 3, 5, 6, 8]), ("RagsToRiches", [2, 3, 4, 6, 8])],
    "n07": [("Oedipus", [2, 4, 6, 7, 9]), ("Oedipus", [2, 4, 5, 8, 9])],
    "n08": [("ManInHole", [2, 3, 4, 6, 8]), ("ManInHole", [2, 3, 4, 7, 8]), ("ManInHole", [3, 3, 5, 6, 8])],
    "n09": [("ManInHole", [2, 4, 6, 7, 8]), ("Cinderella", [2, 4, 6, 7, 8]), ("Cinderella", [2, 4, 6, 7, 8])],
    "n10": [("ManInHole", [2, 4, 6, 7, 8]), ("ManInHole", [2, 4, 5, 8, 8])],
}

LEXICON = [
    # term, valence, arousal, dominance (synthetic values)
    ("calm", 0.80, 0.10, 0.55), ("content", 0.85, 0.20, 0.60), ("hopeful", 0.90, 0.45, 0.60),
    ("determined", 0.75, 0.70, 0.85), ("anxious", 0.20, 0.80, 0.30), ("afraid", 0.10, 0.85, 0.20),
    ("angry", 0.15, 0.90, 0.70), ("desperate", 0.10, 0.80, 0.25), ("relieved", 0.85, 0.30, 0.55),
    ("joyful", 0.95, 0.75, 0.70), ("sad", 0.10, 0.30, 0.25), ("grieving", 0.05, 0.45, 0.20),
    ("proud", 0.85, 0.60, 0.85), ("ashamed", 0.15, 0.50, 0.20), ("curious", 0.70, 0.55, 0.55),
    ("suspicious", 0.30, 0.60, 0.50), ("triumphant", 0.95, 0.85, 0.90), ("weary", 0.25, 0.15, 0.30),
    ("resentful", 0.15, 0.65, 0.45), ("grateful", 0.90, 0.35, 0.55),
]


def write_corpus():
    with open(OUT / "corpus10.jsonl", "w") as f:
        for nid, title, genre, source, sentences in NARRATIVES:
            rec = {"id": nid, "title": title, "genre": genre, "source": source, "sentences": sentences}
            f.write(json.dumps(rec, ensure_ascii=False) + "\n")


def write_annotations():
    with open(OUT / "gold10.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["narrative_id", "annotator_id", "arc", "tp1", "tp2", "tp3", "tp4", "tp5"])
        for nid, rows in ANNOTATIONS.items():
            for k, (arc, tps) in enumerate(rows):
                w.writerow([nid, f"a{k + 1}", arc] + tps)


def write_lexicon():
    with open(OUT / "lexicon.tsv", "w") as f:
        f.write("term\tvalence\tarousal\tdominance\n")
        for term, v, a, d in LEXICON:
            f.write(f"{term}\t{v:.2f}\t{a:.2f}\t{d:.2f}\n")


def write_rankings():
    # (best, medium, worst) orders and how many suspense judgments use each.
    # Column totals: outline_only 7/9/73, self_tp 43/38/8, human_tp 39/42/8.
    plan = [
        (("outline_only", "self_tp", "human_tp"), 3),
        (("outline_only", "human_tp", "self_tp"), 4),
        (("self_tp", "outline_only", "human_tp"), 5),
        (("self_tp", "human_tp", "outline_only"), 38),
        (("human_tp", "outline_only", "self_tp"), 4),
        (("human_tp", "self_tp", "outline_only"), 35),
    ]
    with open(OUT / "rankings89.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["item_id", "judge_id", "criterion", "best", "medium", "worst"])
        n = 0
        for order, count in plan:
            for _ in range(count):
                n += 1
                w.writerow([f"premise{(n - 1) // 3 + 1:02d}", f"j{(n - 1) % 3 + 1}", "suspense", *order])
    assert n == 89


def write_pairs():
    # aspect -> (outline_only wins, ties, arc_enhanced wins) over 22 judgments
    counts = {
        "theme": (1, 7, 14),
        "setting": (7, 8, 7),
        "conflict": (1, 9, 12),
        "character": (5, 6, 11),
        "overall": (5, 2, 15),
    }
    with open(OUT / "pairs22.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["item_id", "judge_id", "aspect", "verdict"])
        for aspect, (oo, tie, ae) in counts.items():
            verdicts = ["outline_only"] * oo + ["tie"] * tie + ["arc_enhanced"] * ae
            assert len(verdicts) == 22
            for k, v in enumerate(verdicts):
                w.writerow([f"pair{k // 2 + 1:02d}", f"j{k % 2 + 1}", aspect, v])


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    write_corpus()
    write_annotations()
    write_lexicon()
    write_rankings()
    write_pairs()
