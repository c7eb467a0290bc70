#!/usr/bin/env python3
"""Generate the bundled benchmark dataset (data/dataset.json).

The published corpus this workbench was built around is not redistributable
here, so this script builds a deterministic stand-in with the same shape and
the same headline statistics, measured with fcner's reference tokenizer:

    15 articles, 84 gold individuals, 128 gold organizations,
    441 sentences, 11,152 words, 72,332 characters,
    per-article gold counts in [1,12] / [0,16],
    article lengths within 170..1467 words.

Word/sentence/char totals are hit exactly: articles are drafted from
entity-bearing sentence templates, topped up from a filler pool steered
toward the remaining words-per-sentence and letters-per-word budgets, and
finished with three tuned sentences whose word lengths are solved to close
the residual.
"""

from __future__ import annotations

import itertools
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from fcner.corpus import (  # noqa: E402
    Article,
    GoldRecord,
    count_sentences,
    count_words,
    load_dataset,
    write_dataset,
)

TARGET_SENTENCES = 441
TARGET_WORDS = 11152
TARGET_CHARS = 72332

OUT_PATH = Path(__file__).resolve().parents[1] / "data" / "dataset.json"

FIRST_NAMES = [
    "Viktor", "Elena", "Marcus", "Ingrid", "Dmitri", "Sofia", "Johan", "Amara",
    "Pavel", "Lucia", "Heinrich", "Nadia", "Tomas", "Irina", "Carlos", "Greta",
    "Anton", "Mirela", "Stefan", "Leyla", "Bruno", "Katarina", "Omar", "Helena",
    "Ruslan", "Beatriz", "Milan", "Oksana", "Felix", "Daniela", "Igor", "Camille",
    "Petros", "Annika", "Zoran", "Teresa", "Emil", "Yulia", "Hassan", "Verena",
    "Luca", "Marta",
]
LAST_NAMES = [
    "Baranov", "Keller", "Moreau", "Silva", "Novak", "Lindqvist", "Petrov",
    "Carvalho", "Weiss", "Janssen", "Kowalski", "Rossi", "Dimitrov", "Haugen",
    "Farkas", "Virtanen", "Marinescu", "Delgado", "Brandt", "Oliveira",
    "Sokolov", "Meijer", "Vasquez", "Leclerc", "Andersson", "Popescu",
    "Schreiber", "Costa", "Ivanenko", "Bergstrom", "Nagy", "Duarte", "Volkov",
    "Fischer", "Mbeki", "Karlsen", "Toth", "Alvarez", "Jensen", "Morozov",
    "Steiner", "Vidal",
]

ORG_PREFIXES = [
    "Meridian", "Northgate", "Caspian", "Atlas", "Baltic", "Crownpoint",
    "Vanguard", "Helios", "Adriatic", "Sterling", "Lakeview", "Pinnacle",
    "Danubia", "Westbrook", "Orion", "Cobalt", "Harborline", "Summit",
    "Redstone", "Aurora", "Keystone", "Silverpine", "Eastbridge", "Falcon",
    "Granite", "Tidewater", "Ironwood", "Lighthouse", "Bluewater", "Highfield",
    "Southmoor", "Clearline", "Stonegate", "Marwood", "Northwind", "Goldcrest",
    "Elmworth", "Ravenna", "Castellan", "Bayside",
]
ORG_CORES = [
    "Trade", "Capital", "Logistics", "Commodities", "Maritime", "Energy",
    "Property", "Finance", "Shipping", "Timber", "Metals", "Freight",
    "Construction", "Leasing", "Consulting", "Brokerage", "Agro", "Petroleum",
]
ORG_SUFFIXES = ["Holdings", "Partners", "Group", "Ltd", "Trust", "Corporation", "Services"]

# Public bodies woven into the narratives; "gold" is the annotated spelling,
# "mention" is how the article text styles it. The all-caps mentions give a
# conventional tagger output that only matching can align with the gold form.
PUBLIC_BODIES = [
    ("Europol", "Europol"),
    ("Interpol", "Interpol"),
    ("Eurojust", "EUROJUST"),
    ("FinCEN", "FINCEN"),
    ("European Anti-Fraud Office", "European Anti-Fraud Office"),
    ("Financial Action Task Force", "Financial Action Task Force"),
    ("Serious Fraud Office", "Serious Fraud Office"),
    ("Securities and Exchange Commission", "Securities and Exchange Commission"),
    ("Veltron", "VELTRON"),
    ("Norfund Compliance Authority", "Norfund Compliance Authority"),
    ("Riga Customs Directorate", "Riga Customs Directorate"),
    ("Tallinn District Prosecution Service", "Tallinn District Prosecution Service"),
    ("Adler Continental Bank", "ADLER CONTINENTAL BANK"),
    ("Geneva Cantonal Court", "Geneva Cantonal Court"),
]

CITIES = [
    "Vilnius", "Rotterdam", "Valletta", "Bratislava", "Tallinn", "Limassol",
    "Hamburg", "Riga", "Vienna", "Marseille", "Gdansk", "Tbilisi", "Porto",
    "Zagreb", "Antwerp",
]
THEMES = [
    "a cross-border money laundering network", "an oil trading sanctions evasion scheme",
    "a procurement kickback arrangement", "a shell company invoice carousel",
    "a bribery ring around port concessions", "a falsified grain export operation",
    "a fraudulent infrastructure tender", "an offshore real estate laundering chain",
    "a diverted development fund scandal", "a smuggled metals financing scheme",
    "a covert securities manipulation pool", "a ghost payroll embezzlement case",
    "a disguised arms brokerage network", "a rigged privatisation auction",
    "a luxury asset concealment scheme",
]
CASE_LABELS = [
    "Case Harbourlight", "Case Amber Ledger", "Case Silent Anchor", "Case Paper Bridge",
    "Case Grey Meridian", "Case Hollow Crate", "Case Winter Audit", "Case Broken Seal",
    "Case Long Shadow", "Case Quiet Pier", "Case Double Entry", "Case Salt Route",
    "Case Glass Vault", "Case Last Invoice", "Case Still Water",
]

LEDE = (
    "Prosecutors in {city} unsealed a new round of charges this week in the investigation known as {case}, "
    "describing it to reporters as {theme} that moved money across at least four jurisdictions over several years."
)

PERSON_SINGLE = [
    "Investigators allege that {p1} arranged a series of back-dated consultancy agreements over several years and routed the resulting fees through numbered accounts held under borrowed names.",
    "According to the indictment, {p1} personally approved a long run of payments that auditors later found had no matching deliveries, contracts, or correspondence of any kind behind them.",
    "Witnesses told the court that {p1} was introduced to partners as an independent adviser while quietly holding signing rights over most of the accounts now frozen by the order.",
    "Banking records reviewed by the financial intelligence unit show {p1} authorising substantial transfers within minutes of receiving instructions from a prepaid phone registered to a demolished address.",
    "Defense lawyers for {p1} argued that the disputed paperwork was assembled by subordinates under time pressure and that their client never read the annexes now cited as central evidence.",
    "A former accountant testified that {p1} dictated round-figure invoice amounts from memory and insisted that the supporting documentation be produced only after each payment had already cleared.",
    "In a statement read out by counsel, {p1} denied any knowledge of the offshore structures and attributed the entire arrangement to a former business partner who has since left the country.",
    "The extradition request concerning {p1} cites wire fraud, document forgery, and participation in an organised criminal group, and notes that two earlier summonses went unanswered.",
    "Prosecutors say {p1} maintained a handwritten ledger of side payments in a rented storage unit, which investigators recovered intact during the second search of the premises.",
]

PERSON_PAIR = [
    "Court filings describe how {p1} and {p2} exchanged coded messages about invoice totals for months before the first transfers were flagged by a junior compliance officer.",
    "The filings state that {p1} recruited {p2} to act as a nominee director, promising a fixed monthly retainer in exchange for signatures, discretion, and no questions about the paperwork.",
    "Travel records place {p1} and {p2} at the same coastal resort on the weekend the escrow arrangement was renegotiated, a coincidence that the defense has repeatedly disputed.",
    "Intercepted calls suggest that {p1} warned {p2} about the forthcoming audit nearly three weeks before the inspection order was formally signed, prosecutors told the panel.",
]

ORG_SINGLE = [
    "Registry documents show that {o1} shared an address, an external accountant, and even a fax line with three other companies already named elsewhere in the case file.",
    "Compliance staff at {o1} filed an internal alert about the unusual transaction pattern, but the report was marked resolved and closed without substantive review within a single week.",
    "The liquidator appointed to {o1} told the court that the company kept no inventory, employed no staff, and occupied no premises beyond a rented mailbox near the port.",
    "Records subpoenaed from {o1} reveal a steady rhythm of transfers timed to the working hours of a different continent than the one shown as its registered seat.",
    "Shares in {o1} changed hands twice during the audit window, each time moving to a newly formed holding entity with no traceable beneficial owner on file.",
    "The freight manifests attributed to {o1} list cargo volumes that would have exceeded the combined capacity of every vessel the company has ever declared or chartered.",
    "Payments described in the books of {o1} as equipment leasing fees flowed outward into correspondent accounts and returned weeks later relabelled as shareholder loans.",
]

ORG_PAIR = [
    "Auditors traced a chain of invoices running from {o1} to {o2}, each step adding a modest margin for advisory services that inspectors could never locate in practice.",
    "Contracts between {o1} and {o2} were signed on consecutive days with identical wording and amounts that differed only by a rounding fee of a few hundred euros.",
    "Inspectors found that {o1} reported revenue only in the quarters when {o2} booked matching losses, a mirrored pattern the analytics unit flagged as statistically implausible.",
    "Settlement instructions recovered from a shared server show {o1} and {o2} using the same template, the same reference numbers, and the same typographical mistake in the beneficiary field.",
]

MIXED_SENTENCES = [
    "Through a spokesperson, {p1} denied ever holding a formal position at {o1}, although the corporate registry still lists the name among the founding signatories of the company.",
    "Investigators believe {p1} used {o1} as a clearing point, splitting the incoming sums into amounts calibrated to stay just beneath the thresholds of automated review.",
    "Minutes from a board meeting record {p1} proposing that {o1} open a branch office in a jurisdiction selected explicitly for its generous reporting exemptions.",
    "A consultancy agreement between {p1} and {o1} promised strategic advice on market entry, yet no deliverable of any kind was ever produced for the seven-figure fee.",
    "Analysts working with {o1} reported that accounts linked to {p1} showed deposit patterns inconsistent with any source of income declared to the tax authorities.",
    "When {o1} finally collapsed, the creditors discovered that {p1} had quietly transferred its only liquid assets to a relative's company several weeks before the filing.",
]

# public bodies and courts appear on the investigating side, never as the
# audited company
AGENCY_SENTENCES = [
    "The case file has since been shared with {o1} under a mutual legal assistance request covering three of the transfers.",
    "Analysts seconded from {o1} spent the spring cross-referencing the seized ledgers against registry data from four jurisdictions.",
    "A spokesperson for {o1} confirmed that the agency had flagged several of the accounts involved well before the first arrests.",
    "Investigators credited a tip routed through {o1} with unlocking the earliest of the frozen accounts.",
    "Lawyers expect {o1} to weigh in on the jurisdictional question before the next hearing.",
]

FILLER_POOL = [
    "The case has drawn sustained attention from regulators in three neighbouring countries, each of which has since opened a parallel inquiry of its own into related transfers.",
    "Officials declined to estimate the total damage to the budget, saying any figure would depend on valuations still being prepared by a panel of court-appointed experts.",
    "Several of the seized documents are handwritten and partially water damaged, which the forensic laboratory says has slowed the review by a matter of months.",
    "The investigation began after a routine tax inspection noticed discrepancies between the declared turnover and the sheer volume of international payments passing through the accounts.",
    "Analysts note that schemes of this kind typically depend on a small circle of trusted intermediaries rather than on any large or formally organised structure.",
    "A court spokesperson said the hearings would continue through the autumn session, with a first-instance verdict considered unlikely before the end of the year.",
    "The frozen assets include two apartments, a small marina berth, and a portfolio of bearer instruments whose ultimate ownership remains the subject of competing claims.",
    "Under the new cooperation agreement, the financial intelligence units of the states involved now exchange transaction alerts within hours rather than within weeks.",
    "Local business associations warned against drawing conclusions before the trial concludes, pointing out that several earlier cases of similar scale ended in full acquittals.",
    "Investigators spent the better part of a year reconstructing the payment trail from fragmentary records kept in four languages and two long-defunct banking systems.",
    "The prosecution's timeline spans nearly six years, beginning with a modest consulting contract and ending with the coordinated seizure of accounts in three capitals.",
    "Journalists covering the proceedings were shown a chart of corporate relationships so dense that the presiding judge asked for a simplified version for the record.",
    "None of the defendants entered a plea at the preliminary hearing, and two of them remain abroad despite repeated summonses delivered through diplomatic channels.",
    "Banking supervisors have already tightened the rules governing correspondent accounts, citing this investigation among the principal reasons for the accelerated reform.",
    "The auditors' consolidated report runs to several hundred pages and catalogues transfers routed through at least nine intermediary institutions in six jurisdictions.",
    "Observers say the eventual outcome may influence how courts across the region treat evidence assembled from leaked corporate registries and cooperative liquidators.",
    "A separate civil claim seeks recovery of the diverted funds on behalf of the municipal budget, which had financed a substantial part of the original project.",
    "The defense has formally challenged the admissibility of records obtained from a server located outside the requesting jurisdiction, and a ruling is expected shortly.",
    "Financial analysts reviewing the disclosures describe a familiar architecture of layered transfers, nominee owners, backdated agreements, and conveniently misplaced correspondence.",
    "At the time of publication, none of the companies named in the indictment had responded to repeated written requests for comment from this newspaper.",
    "Court officers catalogued the physical exhibits over three full weeks, numbering every page by hand in order to preserve an unbroken chain of custody.",
    "The inquiry has already produced convictions in two related proceedings, both of which involved falsified customs declarations and fictitious transit paperwork.",
    "Whistleblower protection became a central topic at trial after a former clerk described sustained pressure to alter internal records ahead of scheduled inspections.",
    "Recovered correspondence suggests that several participants rehearsed their answers to standard compliance questionnaires together before submitting them to the bank.",
    "An expert witness estimated that less than a tenth of the diverted funds can still be located anywhere within the formal banking system today.",
    "The hearing adjourned early when defense counsel requested additional time to review newly disclosed spreadsheets spanning four fiscal years and three currencies.",
    "Regulators emphasised that most of the institutions touched by the scheme cooperated fully once the freezing orders had been formally served on their boards.",
    "The ruling on jurisdiction is expected to set a durable precedent for prosecutions built on records gathered abroad by foreign liquidators and insolvency courts.",
    "Customs data later showed that the declared shipments would have required roughly twice the port handling capacity actually available during that season.",
    "One juror was excused midway through the proceedings, and the court said only that the reasons were personal and unrelated to the case.",
    "The file has grown so large that the court had to move it all to a bigger room down the hall, a clerk said.",
    "It took the team five days just to sort the mail bags, and a week more to log who sent what to whom.",
    "The judge told both sides to keep to the point and to file their notes on time.",
    "Much of the money is still missing, and no one at the bank will say where it went.",
    "The case began with a tip from a clerk who felt the sums did not add up.",
    "Two of the firms had no staff at all, just a name on a door and a phone that rang out.",
    "He said he signed what was put in front of him and did not ask why.",
    "The court will sit again next month, and the press gallery is expected to be full.",
    "For weeks the team read old mail, bank slips, and notes kept in shoe boxes.",
    "Some of the funds came back in small sums, paid into the same accounts they had left.",
    "No date has been set for a verdict in the case, and few expect one soon.",
    "The town has talked of little else since the first arrests were made in the spring.",
    "The bank said it had done what the law asks of it, and that the rest was for the court to say.",
    "Those who know the file say it will take the new judge a month just to read all of it.",
    "No one at the firm would say who had the key to the room where the books were kept.",
    "The men met twice a week at the back of a cafe near the port, the waiter told the court.",
    "Some of the cash went out in bags, and some of it never left the vault at all.",
    "The old board knew more than it let on, one of the clerks told the panel last week.",
    "What began as a small favour grew, year by year, into a debt that no one could repay.",
    "Half of the town seems to have had a stake in the deal at one time or another.",
    "The court heard that much of the money left the bank in the week after the audit was first announced, and that no one thought to ask why at the time.",
    "One of the men said he had been told the firm was sound, and that he had no way to know what the books hid until the day the police came.",
    "The panel was told that the cash moved in small lots from one desk to the next, and that by the end of the year no one could say where it had gone.",
    "A guard who worked the night shift said trucks came and went at odd hours, and that he was told to log them as routine and keep the gate open.",
    "Those close to the case say the first sign of trouble was a loan that no one at the head office could recall having signed off on.",
    "The judge asked the parties to agree on what the key terms of the deal had meant, and both sides said they could not do so under oath.",
    "Auditors called the bookkeeping adequate on paper and useless in practice.",
    "Prosecutors consider the recovered ledgers decisive, while the defense calls them incomplete.",
    "Regulators described the corporate structure as deliberately opaque and unusually difficult to audit.",
    "Each transfer was modest on its own, and that was precisely the point, investigators argue.",
    "The tribunal reserved judgment on the forfeiture question until the final accounting is complete.",
    "Interviews with former employees produced consistent accounts of informal approvals and missing paperwork.",
    "Settlement talks collapsed twice before the parties agreed even on a shared list of exhibits.",
    "A reconstruction of the cash flows filled an entire wall of the incident room.",
    "The registry entries were formally correct, investigators concede, and that formality was the camouflage.",
    "Counsel for the trustees asked the court to unseal additional correspondence next term.",
]


def _word_bank(pairs):
    table = {}
    for word in pairs:
        table.setdefault(len(word), []).append(word)
    return table


ADJECTIVES = _word_bank(
    "new old odd raw dim long cold vast grim thin dense stale heavy blunt tired opaque narrow formal sealed "
    "costly complex obscure layered chaotic precise detailed rigorous punitive unsigned profuse sprawling "
    "redundant intricate elaborate technical convoluted exhaustive disordered mismatched voluminous duplicative "
    "contentious substantial handwritten overstuffed intermingled inconsistent untranslated unclassified "
    "accumulating unpredictable international institutional indeterminate uncategorised".split()
)
NOUNS = _word_bank(
    "log file page memo note pages files notes forms ledger folder binder annexe binders ledgers volumes folders "
    "exhibits listings appendix booklets summaries schedules registers printouts appendices statements worksheets "
    "chronicles annotations attachments memorandums inventories spreadsheets certificates counterparts depositions "
    "documentation registrations confirmations".split()
)

# Tuned closing sentences: a fixed prefix plus adjective/noun phrases whose
# word lengths are solved to land the corpus totals exactly. Six of them
# give the solver a wide words/chars window, so the greedy fill only has to
# land somewhere inside it.
TUNE_COUNT = 6
TUNE_PREFIXES = [
    "Prosecutors noted that the consolidated dossier now spans",
    "Clerks confirmed that the indexed evidence bundle already contains",
    "Reviewers reported that the final disclosure archive comprises",
    "The registry of seized material lists, among other things,",
    "Court staff say the exhibit room now holds",
    "By the clerk's own tally the annexes amount to",
]
TUNE_MIN_WORDS = 12  # longest prefix plus the smallest tail
TUNE_MAX_WORDS = 50  # long tails render as comma-separated phrase lists

# (individuals, organizations, word budget) per article; gold totals are 84
# and 128, counts stay within [1,12] / [0,16].
ARTICLE_PLANS = [
    (12, 16, 1390),
    (9, 14, 1160),
    (8, 13, 1030),
    (7, 12, 950),
    (7, 11, 890),
    (6, 10, 830),
    (6, 10, 780),
    (5, 9, 720),
    (5, 8, 660),
    (4, 7, 600),
    (4, 7, 540),
    (4, 5, 470),
    (3, 4, 330),
    (3, 2, 240),
    (1, 0, 180),
]


class Body:
    def __init__(self) -> None:
        self.sentences: list[str] = []

    def add(self, sentence: str) -> None:
        assert count_sentences(sentence) == 1, f"not exactly one sentence: {sentence!r}"
        self.sentences.append(sentence)

    def text(self) -> str:
        return " ".join(self.sentences)

    @property
    def words(self) -> int:
        return count_words(self.text())


def build_entities(rng: random.Random) -> tuple[list[str], list[tuple[str, str]]]:
    combos = list(itertools.product(FIRST_NAMES, LAST_NAMES))
    rng.shuffle(combos)
    persons = [f"{first} {last}" for first, last in combos[:84]]

    orgs: list[tuple[str, str]] = []
    seen = set()
    combos2 = list(itertools.product(ORG_PREFIXES, ORG_CORES, ORG_SUFFIXES))
    rng.shuffle(combos2)
    for prefix, core, suffix in combos2:
        if len(orgs) >= 128 - len(PUBLIC_BODIES):
            break
        name = f"{prefix} {core} {suffix}"
        if name not in seen:
            seen.add(name)
            orgs.append((name, name))
    # interleave the public bodies so the case-variant mentions spread out
    for i, body in enumerate(PUBLIC_BODIES):
        orgs.insert(i * 8, body)
    return persons, orgs


def draft_article(
    index: int,
    n_ind: int,
    n_org: int,
    persons: list[str],
    orgs: list[tuple[str, str]],
    rng: random.Random,
) -> tuple[Body, list[str], list[str]]:
    """Lede plus just enough entity-bearing sentences to mention every gold
    entity once; the global fill pass adds the narrative padding."""
    body = Body()
    body.add(LEDE.format(city=CITIES[index], case=CASE_LABELS[index], theme=THEMES[index]))

    pq = [persons.pop() for _ in range(n_ind)]
    oq = [orgs.pop() for _ in range(n_org)]
    gold_ind: list[str] = []
    gold_org: list[str] = []

    def take_person() -> str:
        p = pq.pop(0)
        gold_ind.append(p)
        return p

    def take_org() -> str:
        gold, mention = oq.pop(0)
        gold_org.append(gold)
        return mention

    p_single = itertools.cycle(rng.sample(PERSON_SINGLE, len(PERSON_SINGLE)))
    p_pair = itertools.cycle(rng.sample(PERSON_PAIR, len(PERSON_PAIR)))
    o_single = itertools.cycle(rng.sample(ORG_SINGLE, len(ORG_SINGLE)))
    o_pair = itertools.cycle(rng.sample(ORG_PAIR, len(ORG_PAIR)))
    mixed = itertools.cycle(rng.sample(MIXED_SENTENCES, len(MIXED_SENTENCES)))
    agency = itertools.cycle(rng.sample(AGENCY_SENTENCES, len(AGENCY_SENTENCES)))
    public_golds = {g for g, _ in PUBLIC_BODIES}

    def next_is_public() -> bool:
        return bool(oq) and oq[0][0] in public_golds

    while pq or oq:
        roll = rng.random()
        if next_is_public():
            body.add(next(agency).format(o1=take_org()))
        elif pq and oq and roll < 0.3:
            body.add(next(mixed).format(p1=take_person(), o1=take_org()))
        elif pq and (len(pq) >= len(oq) or not oq):
            if len(pq) >= 2 and roll < 0.6:
                body.add(next(p_pair).format(p1=take_person(), p2=take_person()))
            else:
                body.add(next(p_single).format(p1=take_person()))
        else:
            if len(oq) >= 2 and roll < 0.6 and oq[1][0] not in public_golds:
                body.add(next(o_pair).format(o1=take_org(), o2=take_org()))
            else:
                body.add(next(o_single).format(o1=take_org()))
    return body, gold_ind, gold_org


def corpus_counts(bodies: list[Body]) -> tuple[int, int, int]:
    s = sum(count_sentences(b.text()) for b in bodies)
    w = sum(count_words(b.text()) for b in bodies)
    c = sum(len(b.text()) for b in bodies)
    return s, w, c


_POOL_W = [count_words(s) for s in FILLER_POOL]
POOL_MIN_W, POOL_MAX_W = min(_POOL_W), max(_POOL_W)


def pick_filler(
    d_s: int, d_w: int, d_c: int, recent: list[str], article_used: dict[str, int]
) -> str | None:
    """Filler sentence that keeps the remaining fill solvable: the word
    budget left after this pick must stay reachable by the remaining pool
    picks plus the tuned closers, with the per-sentence average and the
    letters-per-word ratio steered toward the remaining need. Recently used
    sentences and sentences already appearing twice in the target article
    are avoided. Returns None when no candidate keeps the budget feasible
    (the tuner takes over)."""
    need_w = d_w / d_s
    need_ratio = (d_c - d_w - d_s) / max(d_w, 1)
    best, best_score = None, None
    for s in FILLER_POOL:
        if s in recent or article_used.get(s, 0) >= 2:
            continue
        w, ln = count_words(s), len(s)
        rest = d_s - 1
        fills = rest - TUNE_COUNT
        lo = fills * POOL_MIN_W + TUNE_COUNT * TUNE_MIN_WORDS
        hi = fills * POOL_MAX_W + TUNE_COUNT * TUNE_MAX_WORDS
        if not lo <= d_w - w <= hi:
            continue
        if fills == 0 and not _tuner_reads_well(d_w - w, d_c - ln - 1):
            continue
        ratio = (ln - w) / w
        score = abs(w - need_w) + 4.0 * abs(ratio - need_ratio)
        if best_score is None or score < best_score:
            best, best_score = s, score
    return best


def _tuner_reads_well(d_w: int, d_c: int) -> bool:
    """The closing sentences should not be forced into all-minimum or
    all-maximum word lengths; keep their tail chars-per-word mid-range."""
    prefix_w = sum(count_words(p) for p in TUNE_PREFIXES[:TUNE_COUNT])
    prefix_c = sum(len(p) + 3 for p in TUNE_PREFIXES[:TUNE_COUNT])
    t_total = d_w - prefix_w
    if t_total < 2 * TUNE_COUNT:
        return False
    per_word = (d_c - prefix_c) / t_total
    return 5.8 <= per_word <= 11.5


def _phrase_splits(t: int) -> list[list[int]]:
    """Ways to split a t-word tail into adjective/noun phrases of 2..4
    words; with two or more phrases one word is the closing "and"."""
    splits = []
    if 2 <= t <= 4:
        splits.append([t])
    for k in range(2, t):
        total = t - 1  # reserve the "and"
        if 2 * k <= total <= 4 * k:
            sizes = [2] * k
            extra = total - 2 * k
            for i in range(k):
                add = min(2, extra)
                sizes[i] += add
                extra -= add
            splits.append(sizes)
    return splits


def _tail_char_range(t: int) -> tuple[int, int]:
    lo, hi = None, None
    for sizes in _phrase_splits(t):
        k = len(sizes)
        fixed = (t - 1) + (k - 1 if k > 1 else 0) + (3 if k > 1 else 0)
        free = t - (1 if k > 1 else 0)
        a, b = fixed + 3 * free, fixed + 13 * free
        lo = a if lo is None else min(lo, a)
        hi = b if hi is None else max(hi, b)
    assert lo is not None, f"no phrase split for t={t}"
    return lo, hi


def solve_tail(t: int, tail_chars: int, rng: random.Random) -> str:
    """A t-word tail rendered with exactly ``tail_chars`` characters:
    adjective/noun phrases in an Oxford-comma list, free word lengths
    constrained to 3..13."""
    for sizes in _phrase_splits(t):
        k = len(sizes)
        # fixed chars: inter-word spaces, commas, and the "and" itself
        fixed = (t - 1) + (k - 1 if k > 1 else 0) + (3 if k > 1 else 0)
        free = t - (1 if k > 1 else 0)
        budget = tail_chars - fixed
        if not 3 * free <= budget <= 13 * free:
            continue
        lengths = []
        rem = budget
        for n in range(free):
            left = free - n - 1
            lo = max(3, rem - 13 * left)
            hi = min(13, rem - 3 * left)
            lengths.append(min(max(round(rem / (left + 1)), lo), hi))
            rem -= lengths[-1]
        used: set[str] = set()

        def pick(bucket: list[str]) -> str:
            fresh = [w for w in bucket if w not in used]
            word = rng.choice(fresh or bucket)
            used.add(word)
            return word

        phrases = []
        i = 0
        for size in sizes:
            words = [pick(ADJECTIVES[lengths[i + j]]) for j in range(size - 1)]
            words.append(pick(NOUNS[lengths[i + size - 1]]))
            i += size
            phrases.append(" ".join(words))
        if k == 1:
            return phrases[0]
        return ", ".join(phrases[:-1]) + ", and " + phrases[-1]
    raise AssertionError(f"no feasible tail for t={t}, chars={tail_chars}")


def tune_sentences(d_s: int, d_w: int, d_c: int, rng: random.Random) -> list[str]:
    """The final ``d_s`` sentences consuming exactly ``d_w`` words and
    ``d_c`` characters (each will be appended after a joining space)."""
    prefixes = [
        (p, count_words(p), len(p))
        for p in itertools.islice(itertools.cycle(TUNE_PREFIXES), d_s)
    ]
    ts_total = d_w - sum(w for _, w, _ in prefixes)
    assert ts_total >= 2 * d_s, (d_w, d_s)
    base_t = ts_total // d_s
    ts = [base_t] * d_s
    for i in range(ts_total - base_t * d_s):
        ts[i] += 1
    # chars contributed per sentence: 1 join space + len(prefix) + 1 space
    # + tail chars + 1 period
    tail_chars_total = d_c - sum(ln + 3 for _, _, ln in prefixes)
    ranges = [_tail_char_range(t) for t in ts]
    assert sum(r[0] for r in ranges) <= tail_chars_total <= sum(r[1] for r in ranges), (
        ts,
        tail_chars_total,
        ranges,
    )
    chars = []
    rem = tail_chars_total
    for i in range(d_s):
        rest = ranges[i + 1 :]
        lo = max(ranges[i][0], rem - sum(r[1] for r in rest))
        hi = min(ranges[i][1], rem - sum(r[0] for r in rest))
        pick = min(max(round(rem * ts[i] / sum(ts[i:])), lo), hi) if rest else rem
        chars.append(pick)
        rem -= pick
    out = []
    for (prefix, _, _), t, tc in zip(prefixes, ts, chars):
        out.append(f"{prefix} {solve_tail(t, tc, rng)}.")
    return out


def main() -> None:
    rng = random.Random(20240915)
    persons, orgs = build_entities(rng)
    bodies: list[Body] = []
    gold_rows: list[tuple[list[str], list[str]]] = []
    for i, (n_ind, n_org, _) in enumerate(ARTICLE_PLANS):
        body, g_ind, g_org = draft_article(i, n_ind, n_org, persons, orgs, rng)
        bodies.append(body)
        gold_rows.append((g_ind, g_org))

    # global top-up: feed fillers to the article furthest below its word
    # budget until only the tuned closers remain (or no filler fits)
    s, w, c = corpus_counts(bodies)
    recent: list[str] = []
    used_per_article: list[dict[str, int]] = [{} for _ in bodies]
    while TARGET_SENTENCES - s > TUNE_COUNT:
        gaps = [(ARTICLE_PLANS[i][2] - b.words, i) for i, b in enumerate(bodies)]
        gaps.sort(reverse=True)
        i = gaps[0][1]
        d_s, d_w, d_c = TARGET_SENTENCES - s, TARGET_WORDS - w, TARGET_CHARS - c
        sentence = pick_filler(d_s, d_w, d_c, recent, used_per_article[i])
        if sentence is None:
            break
        bodies[i].add(sentence)
        used_per_article[i][sentence] = used_per_article[i].get(sentence, 0) + 1
        recent.append(sentence)
        if len(recent) > 10:
            recent.pop(0)
        s, w, c = corpus_counts(bodies)

    d_s, d_w, d_c = TARGET_SENTENCES - s, TARGET_WORDS - w, TARGET_CHARS - c
    print(f"residual before tuning: sentences={d_s} words={d_w} chars={d_c}")
    tuned = tune_sentences(d_s, d_w, d_c, rng)
    targets = sorted(range(len(bodies)), key=lambda i: ARTICLE_PLANS[i][2] - bodies[i].words, reverse=True)
    for i, sentence in zip(targets, tuned):
        bodies[i].add(sentence)

    articles = []
    gold = []
    for i, (body, (g_ind, g_org)) in enumerate(zip(bodies, gold_rows)):
        text = body.text()
        wc = count_words(text)
        assert 170 <= wc <= 1467, (i, wc)
        article_id = f"a{i + 1:02d}"
        articles.append(
            Article(
                id=article_id,
                body=text,
                title=f"{CASE_LABELS[i]}: new developments in {CITIES[i]}",
                case_label=CASE_LABELS[i],
            )
        )
        gold.append(GoldRecord(article_id=article_id, individuals=tuple(g_ind), organizations=tuple(g_org)))

    s, w, c = corpus_counts(bodies)
    assert s == TARGET_SENTENCES, s
    assert w == TARGET_WORDS, w
    assert c == TARGET_CHARS, c
    assert sum(len(g.individuals) for g in gold) == 84
    assert sum(len(g.organizations) for g in gold) == 128
    assert all(1 <= len(g.individuals) <= 12 for g in gold)
    assert all(0 <= len(g.organizations) <= 16 for g in gold)

    write_dataset(OUT_PATH, articles, gold)
    loaded_articles, loaded_gold = load_dataset(OUT_PATH)
    assert len(loaded_articles) == 15 and len(loaded_gold) == 15
    assert [a.body for a in loaded_articles] == [b.text() for b in bodies]
    print(f"wrote {OUT_PATH}: sentences={s} words={w} chars={c}")


if __name__ == "__main__":
    main()
