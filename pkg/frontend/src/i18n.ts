// Bilingual chrome: Arabic first (the content language), English alongside.
// QA fail reasons and API error codes map to fixed human-readable strings so
// tests can assert on them.

import type { FailReason } from "./api/types";

export interface Bilingual {
  ar: string;
  en: string;
}

export function bi(text: Bilingual): string {
  return `${text.ar} · ${text.en}`;
}

export const L = {
  appName: { ar: "جمع الأصوات", en: "SpeechCrowd" },
  login: { ar: "تسجيل الدخول", en: "Log in" },
  register: { ar: "إنشاء حساب", en: "Register" },
  logout: { ar: "خروج", en: "Log out" },
  record: { ar: "تسجيل", en: "Record" },
  review: { ar: "المراجعة", en: "Review" },
  admin: { ar: "الإدارة", en: "Admin" },
  submissions: { ar: "التسجيلات", en: "Submissions" },
  users: { ar: "المستخدمون", en: "Users" },
  startRecording: { ar: "ابدأ التسجيل", en: "Start recording" },
  stopAndUpload: { ar: "أوقف وارفع", en: "Stop & upload" },
  reRecord: { ar: "أعد التسجيل", en: "Re-record" },
  uploading: { ar: "جارٍ الرفع", en: "Uploading" },
  qaPassed: { ar: "اجتاز الفحص الآلي", en: "Passed automated QA" },
  qaFailed: { ar: "لم يجتز الفحص الآلي", en: "Failed automated QA" },
  promptsDone: { ar: "أنهيت كل الجمل لهذه اللهجة", en: "All prompts done for this dialect" },
  liveTakeExists: {
    ar: "لديك تسجيل قائم لهذه الجملة؛ راجعه (إرسال أو إعادة) أولا",
    en: "You already have a live take for this prompt; submit or redo it first",
  },
  micDenied: {
    ar: "تم رفض إذن الميكروفون: فعل الوصول من إعدادات المتصفح ثم أعد المحاولة",
    en: "Microphone permission denied: allow access in browser settings and retry",
  },
  myRecordings: { ar: "تسجيلاتي", en: "My Recordings" },
  validateOthers: { ar: "مراجعة الآخرين", en: "Validate Others" },
  submit: { ar: "إرسال", en: "Submit" },
  redo: { ar: "إعادة", en: "Redo" },
  approve: { ar: "قبول", en: "Approve" },
  reject: { ar: "رفض", en: "Reject" },
  flag: { ar: "تعليم للإدارة", en: "Flag" },
  annotation: { ar: "ملاحظة", en: "Annotation" },
  feedback: { ar: "ملاحظات للمسجل", en: "Feedback" },
  play: { ar: "تشغيل", en: "Play" },
  delete: { ar: "حذف", en: "Delete" },
  block: { ar: "حظر", en: "Block" },
  blocked: { ar: "محظور", en: "Blocked" },
  grantAdmin: { ar: "منح صلاحية الإدارة", en: "Grant admin" },
  cascadeDelete: { ar: "مع حذف كل تسجيلاته", en: "also delete their submissions" },
  confirmTyping: { ar: "اكتب الكلمة للتأكيد", en: "type the word to confirm" },
  loadMore: { ar: "المزيد", en: "Load more" },
  becomeAnnotator: { ar: "فعل دور المراجع", en: "Become an annotator" },
  reviewedElsewhere: {
    ar: "روجع هذا التسجيل من طرف آخر",
    en: "This item was already reviewed elsewhere",
  },
  forbiddenPage: {
    ar: "هذه الصفحة تتطلب صلاحيات أعلى",
    en: "This page needs a role your account does not have",
  },
  uploadPrompts: { ar: "رفع جمل جديدة", en: "Upload prompts" },
  createTask: { ar: "إنشاء مهمة", en: "Create task" },
  statsTitle: { ar: "لوحة الإحصاءات", en: "Dashboard" },
  hoursAccepted: { ar: "ساعات مقبولة", en: "accepted hours" },
  acceptanceRate: { ar: "نسبة القبول", en: "acceptance rate" },
} satisfies Record<string, Bilingual>;

export const FAIL_REASON_TEXT: Record<FailReason, Bilingual> = {
  too_long: { ar: "التسجيل أطول من الحد المسموح", en: "Recording is too long" },
  too_little_speech: { ar: "التسجيل قصير جدا أو منخفض الصوت", en: "Recording too quiet/short" },
  mostly_silence: { ar: "معظم التسجيل صمت", en: "Recording is mostly silence" },
  clipped: { ar: "الصوت مشوه لارتفاعه", en: "Audio is clipped (too loud)" },
  low_confidence: { ar: "الكلام لا يطابق النص المعروض", en: "Speech does not match the prompt" },
};

export function failReasonText(reason: FailReason): string {
  return bi(FAIL_REASON_TEXT[reason] ?? { ar: reason, en: reason });
}

// Every server error code gets a toast; unknown codes fall back to generic.
export const ERROR_TEXT: Record<string, Bilingual> = {
  invalid_request: { ar: "طلب غير صالح", en: "Invalid request" },
  bad_dialect: { ar: "لهجة غير معروفة", en: "Unknown dialect label" },
  bad_range: { ar: "نطاق تاريخ غير صالح", en: "Invalid date range" },
  malformed_audio: { ar: "ملف صوتي غير صالح", en: "Audio file is not a valid WAV" },
  malformed_row: { ar: "سطر غير صالح في الملف", en: "Malformed row in upload" },
  weak_password: { ar: "كلمة المرور قصيرة جدا", en: "Password is too short" },
  unauthenticated: { ar: "سجل الدخول أولا", en: "Please log in" },
  bad_credentials: { ar: "بيانات دخول خاطئة", en: "Wrong email or password" },
  forbidden: { ar: "غير مسموح", en: "Not allowed" },
  user_blocked: { ar: "هذا الحساب محظور", en: "This account is blocked" },
  not_owner: { ar: "هذا التسجيل ليس لك", en: "Not your recording" },
  cannot_review: { ar: "لا يمكن مراجعة هذا التسجيل", en: "This item cannot be reviewed" },
  not_found: { ar: "غير موجود", en: "Not found" },
  unknown_task: { ar: "مهمة غير معروفة", en: "Unknown task" },
  email_taken: { ar: "البريد مستخدم من قبل", en: "Email already registered" },
  duplicate_live_submission: {
    ar: "لديك تسجيل قائم لهذه الجملة",
    en: "You already have a live take for this prompt",
  },
  duplicate_review: { ar: "راجعت هذا التسجيل من قبل", en: "You already reviewed this item" },
  duplicate_prompt: { ar: "جملة مكررة في الملف", en: "Duplicate prompt in upload" },
  wrong_state: { ar: "حالة التسجيل لا تسمح بهذا", en: "Item is in the wrong state" },
  self_block: { ar: "لا يمكنك حظر نفسك", en: "You cannot block yourself" },
  task_closed: { ar: "المهمة مغلقة", en: "Task is closed" },
  prompt_inactive: { ar: "الجملة لم تعد متاحة", en: "Prompt is no longer recordable" },
  too_large: { ar: "الملف أكبر من الحد المسموح", en: "Upload exceeds the size limit" },
  range_not_satisfiable: { ar: "نطاق بايتات غير صالح", en: "Unsatisfiable byte range" },
  upload_in_flight: { ar: "انتظر انتهاء الرفع الجاري", en: "Wait for the current upload" },
  internal_error: { ar: "خطأ في الخادم", en: "Server error" },
};

export function errorToast(code: string): string {
  const text = ERROR_TEXT[code];
  if (text) return bi(text);
  return bi({ ar: "حدث خطأ غير متوقع", en: `Unexpected error (${code})` });
}
