fn main() {
    std::process::exit(wild_words::cli::run(std::env::args_os()));
}
