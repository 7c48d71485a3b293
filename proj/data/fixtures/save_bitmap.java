public static boolean saveBitmapToFile(Bitmap bmp, String path) {
    File file = new File(path);
    try {
        FileOutputStream fos = new FileOutputStream(file);
        BufferedOutputStream bos = new BufferedOutputStream(fos);
        bmp.compress(Bitmap.CompressFormat.PNG, 100, bos);
        bos.flush();
        bos.close();
        Log.d(TAG, "save to file succeeded");
        return true;
    } catch (IOException e) {
        Log.e(TAG, "save to file failed", e);
    }
    return false;
}
