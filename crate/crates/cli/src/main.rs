fn main() {
    std::process::exit(spamqpt_cli::run(std::env::args_os()));
}
