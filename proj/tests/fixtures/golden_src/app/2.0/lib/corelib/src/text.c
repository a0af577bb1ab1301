size_t core_count_lines(const char *text, size_t len)
{
    size_t n = 0, i;
    for (i = 0; i < len; i++) {
        if (text[i] == 0x0a) n++;
        else if (text[i] == 0x0d && i + 1 < len && text[i + 1] != 0x0a) n++;
    }
    return n;
}
