from .Translator import TranslationResult, translate, translate_program
