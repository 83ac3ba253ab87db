"""The bundled private-banking sample project plus the demo conversation
scripts used by the interactive REPL and the test suite."""

from __future__ import annotations

from .dialog import TurnRecord
from .project import (
    ClosedQAPolicy,
    EntityDef,
    FormDef,
    IntentDef,
    PersonaDef,
    ProjectConfig,
    ResponseTemplate,
    SlotDef,
    TemplateVariant,
    ThresholdConfig,
    TrainingExample,
)

CANCEL_ACCOUNT_UTTERANCES = [
    "I would like to close my account with ABC Bank, please help me with the process.",
    "Can you please guide me on how to cancel my account at ABC Bank?",
    "I want to terminate my banking relationship with ABC Bank, how can I do that?",
    "I'm thinking of closing my account, what is the procedure?",
    "I've decided to cancel my ABC Bank account, can you assist me with this?",
    "Please help me shut down my account with your bank.",
    "I no longer need my account at ABC Bank, how can I close it?",
    "What's the process to deactivate my account with ABC Bank?",
    "I would like to cancel my account; can you guide me through the steps?",
    "I need to close my bank account, what information do you need from me?",
]

TRANSFER_UTTERANCES = [
    "Can you make a transfer of funds out of checking?",
    "Can I transfer funds to another person?",
    "I want to send 500 dollars to a friend",
    "Please transfer money from savings over to checking",
    "How do I wire money abroad, can you send it for me?",
    "I need to make a money transfer today",
    "Transfer funds between my accounts please",
    "Could you send money to my landlord?",
    "My plan is to transfer a large amount of money this week",
    "Hi, I would like to transfer money to a different bank",
]

ADDRESS_UTTERANCES = [
    "I need to change my address",
    "I moved recently and want to update my address",
    "Please update my home address in your system",
    "My new address needs to be registered",
    "How can I change my home address in your records?",
    "BTW, I also need to change my address",
    "My address is not correct anymore, please change it",
    "I want to update my postal address",
    "Could I change the address you have saved for me?",
    "The address you have on file for me is out of date",
]

BALANCE_UTTERANCES = [
    "Tell me my current balance",
    "How much money is left in my savings right now?",
    "Show me my balance please",
    "Can you tell me my balance?",
    "I would like to know the remaining balance in savings",
    "What is the current total of my savings balance right now?",
    "Check my balance, please",
    "Could you look up my balance for me?",
    "Give me the available balance, please",
    "What's the balance of my main account?",
]

PAY_BILL_UTTERANCES = [
    "I want to pay my electricity bill",
    "Can I pay a bill through you?",
    "Please pay my credit card bill",
    "I need to pay my phone bill this month",
    "How do I set up a recurring payment for my rent?",
    "Pay the water bill for me",
    "I would like to pay an open invoice",
    "My gas bill is due tomorrow, can you pay it for me?",
    "Set up a bill payment to the energy company",
    "Could you schedule a payment for my internet bill?",
]

PERSONA_TRAITS = [
    "strong financial knowledge",
    "excellent communication and interpersonal skills",
    "a deep understanding of clients' needs and goals",
    "high ethical standards",
    "discretion and confidentiality",
    "long-lasting relationships based on trust",
]

CLOSED_QA_ANSWERS = [
    "To change your address you need to sent a mail to info.company.com "
    "including your new and old complete address.",
    "If you want to open a bank account, provide a copy of your password and "
    "a list of current bank accounts.",
    "If you want to close an account call 001 23 45 89 28",
    "To change your password sent a mail to info.company.com with that request.",
]
CLOSED_QA_DEFAULT = "Please call 001 23 45 89 01"

APOLOGY_LADDER = [
    "Sorry, I didn't quite get that. Could you rephrase your statement, please?",
    "My apologies, I'm having trouble understanding. Would you mind rephrasing "
    "your question?",
    "I'm sorry, I didn't comprehend your message. Please rephrase it for me.",
    "Apologies for the confusion, I'm unable to grasp what you're saying. "
    "Kindly rephrase your statement.",
    "I deeply regret that I didn't understand your message. Please accept my "
    "apologies and rephrase your question.",
    "My sincerest apologies, I'm struggling to comprehend your message. Could "
    "you kindly restate it for me?",
    "I'm terribly sorry for not understanding your words. Please forgive me "
    "and rephrase your statement.",
    "I feel so apologetic for being unable to understand what you said. Please "
    "give me another chance and rephrase your message.",
    "My most profound apologies for not comprehending your statement. I would "
    "be grateful if you could rephrase it for me.",
    "I am extremely sorry for my inability to understand your message. It "
    "would mean a lot if you could kindly rephrase it for me.",
]

LOCALIZED_STATEMENTS = {
    "product_unavailable": {
        "en": "I regret to inform you that the product is no longer available.",
        "de": "Es tut mir leid, Ihnen mitteilen zu müssen, dass das Produkt "
              "nicht mehr verfügbar ist.",
        "de-CH-x-dialect": "Es tuet mer leid, Ihne mitz'teile, dass s'Produkt "
                           "nümme verfüegbar isch.",
        "es": "Lamento informarle que el producto ya no está disponible.",
        "fr": "Je regrette de vous informer que le produit n'est plus disponible.",
    },
    "reconsider_cancellation": {
        "en": "I implore you to reconsider cancelling your account.",
        "de": "Ich bitte Sie inständig, die Kündigung Ihres Kontos zu überdenken.",
        "de-CH-x-dialect": "Ich bitte Sie inständig, d'Chündigung vo Ihrem "
                           "Konto z'überdenke.",
        "es": "Le imploro que reconsidere cancelar su cuenta.",
        "fr": "Je vous implore de reconsidérer l'annulation de votre compte.",
    },
    "direct_to_agent": {
        "en": "I shall now direct you to an agent who can further assist you.",
        "de": "Ich werde Sie jetzt an einen Agenten weiterleiten, der Ihnen "
              "weiterhelfen kann.",
        "de-CH-x-dialect": "Ich wird Sie jetzt zuenem Agent wyterleite, wo "
                           "Ihnen cha wyterhelfe.",
        "es": "Ahora le dirigiré a un agente que pueda asistirle más.",
        "fr": "Je vais maintenant vous diriger vers un agent qui pourra vous "
              "aider davantage.",
    },
}

INSOLVENT_SYNONYMS = [
    "Bankrupt", "Impoverished", "Penniless", "Financially ruined", "Broke",
    "Indigent", "Destitute", "Impecunious", "In default", "In debt",
    "Insufficient funds", "Unable to pay debts", "Financially distressed",
]


def _examples(texts: list[str]) -> list[TrainingExample]:
    return [TrainingExample(text=t, locale="en", provenance="human") for t in texts]


def _template(key: str, text_or_texts, localized: dict[str, str] | None = None,
              personas: dict[str, str] | None = None) -> ResponseTemplate:
    texts = text_or_texts if isinstance(text_or_texts, list) else [text_or_texts]
    variants = [TemplateVariant(locale="en", persona="default", texts=texts)]
    for locale, text in (localized or {}).items():
        if locale == "en":
            continue
        variants.append(TemplateVariant(locale=locale, persona="default", texts=[text]))
    for persona, text in (personas or {}).items():
        variants.append(TemplateVariant(locale="en", persona=persona, texts=[text]))
    return ResponseTemplate(key=key, variants=variants)


def build_banking_project() -> ProjectConfig:
    """The private-banking assistant the package ships with."""
    intents = [
        IntentDef("cancel_account", _examples(CANCEL_ACCOUNT_UTTERANCES),
                  response_template="cancel_account_info"),
        IntentDef("transfer_funds", _examples(TRANSFER_UTTERANCES)),
        IntentDef("change_address", _examples(ADDRESS_UTTERANCES)),
        IntentDef("check_balance", _examples(BALANCE_UTTERANCES),
                  response_template="balance_info"),
        IntentDef("pay_bill", _examples(PAY_BILL_UTTERANCES),
                  response_template="bill_info"),
    ]

    # postal_code before account_number: a bare 5-digit number is read as a
    # postal code; account numbers in this domain are 5-12 digits
    entities = [
        EntityDef("postal_code", "pattern", pattern=r"\b\d{5}\b"),
        EntityDef("account_number", "pattern", pattern=r"\b\d{5,12}\b"),
        EntityDef(
            "amount", "pattern",
            pattern=(r"(?:[$€£]\s?\d+(?:\.\d+)?"
                     r"|\b\d+(?:\.\d+)?\s?"
                     r"(?:dollars?|usd|euros?|eur|francs?|chf|pounds?|gbp)\b)"),
            normalizer="amount",
        ),
        EntityDef(
            "date", "pattern",
            pattern=(r"\b\d{4}-\d{2}-\d{2}\b"
                     r"|\b\d{1,2} (?:January|February|March|April|May|June|July"
                     r"|August|September|October|November|December)\b"),
        ),
        EntityDef(
            "street", "pattern",
            pattern=(r"\b[A-Za-z][a-z]+ (?:Avenue|Street|Road|Lane|Boulevard"
                     r"|Drive|Way)(?: \d{1,4})?"),
        ),
        EntityDef("city", "gazetteer", values=[
            ("New York", ["NYC", "New York City"]),
            ("Zurich", ["Zürich"]),
            ("Geneva", ["Genève"]),
            ("London", []),
            ("Boston", []),
        ]),
        EntityDef("financial_status", "gazetteer", values=[
            ("insolvent", INSOLVENT_SYNONYMS),
        ]),
    ]

    forms = [
        FormDef(
            name="transfer",
            trigger_intent="transfer_funds",
            slots=[
                SlotDef("source_account", "account_number", "ask_source_account"),
                SlotDef("dest_account", "account_number", "ask_dest_account"),
                SlotDef("amount", "amount", "ask_amount"),
            ],
            completion_template="transfer_complete",
            resume_template="transfer_resume",
            confirm_required=True,
        ),
        FormDef(
            name="address",
            trigger_intent="change_address",
            slots=[
                SlotDef("street", "street", "ask_street"),
                SlotDef("city", "city", "ask_city"),
                SlotDef("postal_code", "postal_code", "ask_postal"),
            ],
            completion_template="address_complete",
            resume_template="address_resume",
            confirm_required=True,
        ),
    ]

    templates = [
        _template("greeting", "Hi, how can I help?"),
        _template("fallback_apology", APOLOGY_LADDER),
        _template("confirm_details",
                  "Before we proceed, please confirm if the provided details "
                  "are correct: {details}"),
        _template("switch_refused",
                  "We have quite a few tasks open already. Let's finish the "
                  "current one first, then I'm happy to help with the next."),
        _template("task_abandoned",
                  "Alright, I have dropped the current task. How else can I help?"),
        _template("ask_source_account",
                  "Sure, I can help you transfer money. Which account should "
                  "the money come from? Please provide your bank account number."),
        _template("ask_dest_account",
                  "Hello! I can help you with the money transfer. Please "
                  "provide the following information: 1. The recipient's bank "
                  "account number. 2. The amount you would like to transfer. "
                  "Once I have this information, I can proceed with the transfer."),
        _template("ask_amount", "How much would you like to transfer?"),
        _template("ask_street",
                  "Sure, I can update your address. Which street and house "
                  "number should we register?"),
        _template("ask_city",
                  "Thank you for providing your new address. To complete the "
                  "address change, please also provide the following "
                  "information: 1. City 2. Postal Code"),
        _template("ask_postal",
                  "Almost done with the address change. Which postal code "
                  "should we register?"),
        _template("transfer_complete",
                  "Thank you for providing the necessary information. Your "
                  "transfer of {amount} to account {dest_account} has been "
                  "submitted."),
        _template("address_complete",
                  "Great, thank you. Your address has been updated to "
                  "{street}, {postal_code} {city}."),
        _template("transfer_resume",
                  "Now, let's get back to the money transfer request."),
        _template("address_resume", "Now, let's get back to your address change."),
        _template("balance_info",
                  "Happy to help with that. I have sent your current balance "
                  "overview to your registered e-mail address."),
        _template("bill_info",
                  "I can help you pay a bill. Please log in to e-banking and "
                  "pick the invoice you would like to settle."),
        _template("cancel_account_info",
                  "I can help you close your account. A client advisor will "
                  "contact you shortly to complete the cancellation."),
        _template(
            "product_unavailable",
            LOCALIZED_STATEMENTS["product_unavailable"]["en"],
            localized=LOCALIZED_STATEMENTS["product_unavailable"],
            personas={
                "british_upper_class":
                    "I regret to inform you that the product you've inquired "
                    "about is no longer available. My sincerest apologies for "
                    "any inconvenience this may have caused. Should you "
                    "require any assistance in finding an alternative, please "
                    "do not hesitate to ask.",
                "simple_english":
                    "I'm sorry, but the product you are looking for is no "
                    "longer available.",
            },
        ),
        _template(
            "reconsider_cancellation",
            LOCALIZED_STATEMENTS["reconsider_cancellation"]["en"],
            localized=LOCALIZED_STATEMENTS["reconsider_cancellation"],
        ),
        _template(
            "direct_to_agent",
            LOCALIZED_STATEMENTS["direct_to_agent"]["en"],
            localized=LOCALIZED_STATEMENTS["direct_to_agent"],
        ),
    ]

    return ProjectConfig(
        name="banking",
        locales=["en", "de", "de-CH-x-dialect", "es", "fr"],
        intents=intents,
        entities=entities,
        forms=forms,
        templates=templates,
        persona=PersonaDef(
            role_description="client advisor in private banking",
            traits=list(PERSONA_TRAITS),
            style_tags=["british_upper_class", "simple_english"],
        ),
        closed_qa=ClosedQAPolicy(
            answers=list(CLOSED_QA_ANSWERS),
            default_answer=CLOSED_QA_DEFAULT,
        ),
        thresholds=ThresholdConfig(),
        max_frame_depth=4,
    )


# The transfer/address context-switching conversation, driven turn by turn.
CONTEXT_SWITCH_SCRIPT = [
    "Hi, I would like to transfer money. My bank account is 334402.",
    "BTW, I also need to change my address: It's Park Avenue 14.",
    "I live in 10012 New York.",
    "I want to transfer 400 Dollars to account number 831123",
    "Yes, the details are correct.",
]

OUT_OF_SCOPE_QUESTION = "Where is Germany?"

# Debit-card replacement conversation that ends in a handoff to a human.
HANDOFF_CONVERSATION = [
    TurnRecord("bot", "Hi, how can I help?"),
    TurnRecord("user", "I need to get a new debit card"),
    TurnRecord("bot", "I can help you order a new debit card. Is this a new "
                      "card or a replacement?"),
    TurnRecord("user", "Replacement"),
    TurnRecord("bot", "Is your current card lost, damaged or stolen?"),
    TurnRecord("user", "Damaged"),
    TurnRecord("bot", "Please go to www.cardreplace.com to request your new "
                      "card. Did I help you today?"),
    TurnRecord("user", "The trouble is the address you have for me is out of "
                       "date, so before you post it you need to update my address"),
    TurnRecord("bot", "I'm worry I didn't understand that. Did I help you today?"),
    TurnRecord("user", "I need to update my address"),
    TurnRecord("bot", "My colleague can help you this query, I'm connecting "
                      "you now. Feel free to add any information that might "
                      "be help now."),
    TurnRecord("user", "My new address is 1 Main Street, Capital City, "
                       "Countryland, AA1 XZY."),
]

HANDOFF_SUMMARY_RESPONSE = (
    "Agent Action Required: Update the user's address and assist with the "
    "debit card replacement process.\n"
    "Summary: The user needs a replacement debit card due to a damaged one. "
    "However, their address on file is outdated. The user provided their new "
    "address as 1 Main Street, Capital City, Countryland, AA1 XZY."
)
